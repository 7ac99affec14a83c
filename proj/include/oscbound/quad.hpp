#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "oscbound/expr.hpp"

namespace oscbound {

struct QuadOptions {
    double tol_rel = 1e-8;
    double tol_abs = 1e-12;
    long max_panels = 20000;  // budget on panel evaluations
    int initial_panels = 1;
};

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    long panels_used = 0;
    bool converged = false;
};

struct OscResult {
    std::complex<double> value{0.0, 0.0};
    double abs_error_estimate = 0.0;
    long panels_used = 0;
    bool converged = false;
    // set when |lambda| * sup|f'| * (b - a) leaves the trustworthy regime
    bool accuracy_warning = false;
};

// One oscillatory experiment: phase f, amplitude phi, interval, lambda grid.
struct PhaseProblem {
    Expr f;
    Expr phi;
    double a = 0.0;
    double b = 1.0;
    std::vector<double> lambda_grid;

    // a < b, lambdas nonzero, strictly increasing
    void validate() const;
};

// Globally adaptive bisection with a 15-point rule and embedded 7-point
// error estimate per panel. `g` must be bounded on [a, b]; endpoint values
// are never requested (all nodes are interior).
QuadResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                              const QuadOptions& opts = {});

// Integral of e^{i lambda f(x)} phi(x) over [a, b]. Panels are first split
// until the phase varies by at most 8*pi on each, then refined wherever the
// embedded error estimate asks for it.
OscResult oscillatory_integral(const std::function<double(double)>& f,
                               const std::function<double(double)>& phi, double a, double b,
                               double lambda, const QuadOptions& opts = {});

OscResult oscillatory_integral(const PhaseProblem& p, double lambda, const QuadOptions& opts = {});

// Panel budget that lets the oscillation-aware splitting succeed for a phase
// with the given value range at this lambda.
long osc_panel_budget(double lambda, double phase_range, long floor_budget = 20000);

}  // namespace oscbound
