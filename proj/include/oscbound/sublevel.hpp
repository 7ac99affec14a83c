#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "oscbound/expr.hpp"

namespace oscbound {

// Axis-aligned box with Lebesgue measure; dimension 1 to 3.
struct Box {
    std::vector<std::array<double, 2>> axes;

    static Box interval(double lo, double hi) { return Box{{{lo, hi}}}; }
    static Box centered(int dim, double radius);
    int dim() const { return static_cast<int>(axes.size()); }
    double measure() const;
};

// Sublevel growth data: measure({|g| < a}) <= C a^delta over the threshold
// grid, with M = sup |g| and the log-log fit residual.
struct GrowthFit {
    double C = 0.0;
    double delta = 0.0;
    double M = 0.0;
    double fit_residual = 0.0;
    std::vector<double> a_grid;
    std::vector<double> measures;
    bool degenerate = false;  // fewer than 3 thresholds with nonzero measure
};

// Deterministic grid counting of sublevel measures followed by a log-log
// least-squares fit of the growth exponent. Default lattice sizes per axis:
// 2^18 in 1-D, 1024 in 2-D, 128 in 3-D (cell midpoints).
GrowthFit estimate_growth(const std::function<double(std::span<const double>)>& g, const Box& box,
                          std::vector<double> a_grid, int points_per_axis = 0);
GrowthFit estimate_growth(const std::function<double(double)>& g, double lo, double hi,
                          std::vector<double> a_grid, int points = 1 << 18);
GrowthFit estimate_growth(const Expr& g, double lo, double hi, std::vector<double> a_grid,
                          int points = 1 << 18);

// Envelope for integrals of min(1, |lambda g|^-eps) given sublevel growth
// measure({|g| < a}) <= C a^delta and M = sup|g|. D is the calibration
// constant for the (delta, eps) pair; see CalibrationTable.
double sublevel_envelope(double C, double delta, double eps, double M, double lambda, double D);

// Sublevel-set counterpart of the derivative test: when |f^(p)| > B on the
// interval, the measure of {|f| < eps} is below c_p' (eps/B)^(1/p).
double vdc_sublevel_bound(double B, int p, double eps, double c_p_prime);

// Measure of {x in [a,b] : |g(x)| < eps} by locating the crossings of
// |g| - eps with bisection; reference-quality for 1-D checks.
double sublevel_measure_refined(const std::function<double(double)>& g, double a, double b,
                                double eps, int grid_n = 8192);

}  // namespace oscbound
