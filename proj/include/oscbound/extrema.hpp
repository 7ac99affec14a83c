#pragma once

#include <functional>

namespace oscbound {

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

// Dense scan plus golden-section polish around the best sample. `n` is the
// number of grid cells; relative polish tolerance ~1e-10.
Extremum maximize_on(const std::function<double(double)>& g, double a, double b, int n = 4096);
Extremum minimize_on(const std::function<double(double)>& g, double a, double b, int n = 4096);

// Grid-only variants (no polish), for hypotheses stated over sampled grids.
Extremum grid_max(const std::function<double(double)>& g, double a, double b, int n = 4096);
Extremum grid_min(const std::function<double(double)>& g, double a, double b, int n = 4096);

}  // namespace oscbound
