#pragma once

#include <span>
#include <utility>

namespace oscbound {

// Ordinary least squares of log(value) on log(lambda); slope is the decay
// exponent estimate.
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    int n_points = 0;
};

// Requires at least 3 samples with positive lambda and value.
DecayFit decay_fit(std::span<const std::pair<double, double>> samples);

// Median of pairwise log-log slopes (Theil-Sen). Used for the no-growth
// gates: ratio series wobble inside a bounded band when stationary-point
// contributions interfere, and a least-squares slope on a handful of dyadic
// samples then reflects where the samples land on the beat rather than any
// actual trend.
double trend_slope(std::span<const std::pair<double, double>> samples);

}  // namespace oscbound
