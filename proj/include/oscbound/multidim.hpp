#pragma once

#include <span>
#include <vector>

#include "oscbound/expr.hpp"
#include "oscbound/quad.hpp"
#include "oscbound/sublevel.hpp"

namespace oscbound {

// Oscillatory box problem in n = 2 or 3 variables over [-r, r]^n.
struct BoxProblem {
    Expr f;
    Expr phi;
    int n = 2;
    double r = 1.0;
    std::vector<double> lambda_grid;

    void validate() const;
};

// sup|phi| over the box plus the sup over the outer coordinates of the inner
// L1 norm of the last-variable derivative of phi.
double amplitude_norm_box(const Expr& phi, int n, double r);

// Growth fits for the two sublevel functionals that drive the averaged
// bound: (d_n f)^2 / |d_n^2 f| over the box, and sup_{x_n} |d_n f| over the
// outer box. The first is taken as +inf where d_n^2 f vanishes but d_n f
// does not, and 0 where both vanish.
struct ExponentPair {
    GrowthFit ratio_fit;  // delta_1, C_1
    GrowthFit sup_fit;    // delta_2, C_2
};
ExponentPair estimate_exponents(const Expr& f, int n, double r, std::vector<double> a_grid);

// Iterated evaluation of the box oscillatory integral: adaptive oscillatory
// quadrature in x_n on a composite 15-point outer grid (~510 nodes for
// n = 2, escalated with the outer phase span while full resolution stays
// affordable; 60 per axis for n = 3). Inner and outer error estimates are
// propagated into the result, so outer under-resolution at very large
// lambda surfaces as converged = false rather than a silent wrong answer.
OscResult box_oscillatory(const BoxProblem& p, double lambda, const QuadOptions& opts = {});

// The averaged bound: the outer integral of the inner capped-ratio integral
// plus the outer integral of min(2r, 1 / (|lambda| sup_{x_n} |d_n f|)).
struct AveragedBound {
    double first_term = 0.0;
    double second_term = 0.0;
    double total = 0.0;
    bool converged = true;
};
AveragedBound averaged_bound(const BoxProblem& p, double lambda, const QuadOptions& opts = {});

// Predicted decay envelope from the growth exponents: |lambda|^-min(d1,d2,1),
// with the extra (1 + log+|lambda|) factor exactly when min(d1,d2) == 1.
// Degenerate (unbounded) exponents are passed as +inf.
double predicted_envelope(double delta1, double delta2, double lambda);

struct BoxDecayRow {
    double lambda = 0.0;
    double abs_j = 0.0;
    double envelope = 0.0;  // without the fitted constant
    double avg_bound = 0.0;
    bool j_converged = true;
};

// Full pipeline record: exponent fits, amplitude factor, per-lambda
// measurements, fitted constants, and pass flags.
struct BoxDecayReport {
    ExponentPair exponents;
    double z_phi = 0.0;
    std::vector<BoxDecayRow> rows;
    double fitted_envelope_const = 0.0;  // max |J| / envelope
    double fitted_avg_const = 0.0;       // max |J| / (z_phi * avg_bound)
    double envelope_trend = 0.0;         // slope of log(|J|/envelope)
    double avg_trend = 0.0;              // slope of log(|J|/(z_phi avg))
    bool envelope_ok = false;
    bool avg_ok = false;
};
BoxDecayReport box_decay_report(const BoxProblem& p, std::vector<double> a_grid,
                                const QuadOptions& opts = {});

}  // namespace oscbound
