#pragma once

#include <vector>

#include "oscbound/expr.hpp"
#include "oscbound/quad.hpp"

namespace oscbound {

// Certificate that some derivative order k has sup/inf ratio below a cap on
// the interval, i.e. the phase is of polynomial type at order k.
struct PolyTypeCertificate {
    int k = 0;
    double A = 0.0;  // twice the measured sup/inf ratio
    int j = 0;       // monotone piece count of f', meaningful when k == 1
    bool valid = false;
};

// The non-oscillatory right-hand side: amplitude factor times the capped
// ratio integral plus an endpoint term.
struct BoundReport {
    double integral_term = 0.0;   // integral of min(1, |f''| / (|lambda| f'^2))
    double endpoint_term = 0.0;
    double amplitude_norm = 0.0;  // sup|phi| + L1 norm of phi'
    double total = 0.0;
    std::vector<double> j_points;  // special points used by the endpoint sum, if any
    bool converged = true;
};

// Smallest k in [1, k_max] whose measured sup/inf ratio of |f^(k)| over the
// sample grid stays below a_cap; A is set to twice the measured ratio.
// valid == false signals that the hypothesis fails for every tested order,
// steering callers to the special-point bound.
PolyTypeCertificate check_polytype(const JetFn& f, double a, double b, int k_max = 8,
                                   double a_cap = 1e6, int grid_n = 4096);
PolyTypeCertificate check_polytype(const Expr& f, double a, double b, int k_max = 8,
                                   double a_cap = 1e6, int grid_n = 4096);

// sup|phi| over [a, b] plus the L1 norm of phi'. Throws EvalError when the
// quadrature fails to converge.
double amplitude_norm(const JetFn& phi, double a, double b, const QuadOptions& opts = {});
double amplitude_norm(const Expr& phi, double a, double b, const QuadOptions& opts = {});

// Bound whose endpoint term uses the global sup of |f'|; valid uniformly for
// polynomial-type phases. The capped integrand is taken to equal 1 wherever
// |f'(x)| < 1e-14.
BoundReport uniform_bound(const JetFn& f, const JetFn& phi, double a, double b, double lambda,
                          const QuadOptions& opts = {});
BoundReport uniform_bound(const Expr& f, const Expr& phi, double a, double b, double lambda,
                          const QuadOptions& opts = {});

// The finite set of endpoints and zeros of f'' and f''' at which f' does not
// vanish (|f'| > 1e-14); these carry the endpoint sum of the fallback bound.
std::vector<double> special_points(const JetFn& f, double a, double b, int grid_n = 4096);
std::vector<double> special_points(const Expr& f, double a, double b, int grid_n = 4096);

// Fallback bound whose endpoint term sums 1/(|lambda| |f'|) over the special
// points; applicable without the polynomial-type hypothesis.
BoundReport special_point_bound(const JetFn& f, const JetFn& phi, double a, double b,
                                double lambda, const QuadOptions& opts = {});
BoundReport special_point_bound(const Expr& f, const Expr& phi, double a, double b, double lambda,
                                const QuadOptions& opts = {});

// Predicted size of a critical point's contribution to the bound:
// |beta|^(-1/(p+1)) |lambda|^(-1/(p+1)) for f'(x) ~ beta (x - x0)^p.
double critical_point_contribution(double beta, int p, double lambda);

}  // namespace oscbound
