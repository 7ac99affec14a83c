#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "oscbound/expr.hpp"
#include "oscbound/quad.hpp"

namespace oscbound {

// Real polynomial with ascending coefficients.
struct Poly {
    std::vector<double> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double operator()(double x) const;
    Jet jet(double x, int order) const;
    Poly derivative() const;
    Poly derivative(int k) const;
    Poly scaled(double s) const;
    JetFn as_jetfn() const;
    std::string to_string() const;
};

// Simultaneous-iteration root finding did not converge; `partial` holds the
// best iterate.
class RootsError : public std::runtime_error {
public:
    RootsError(std::string msg, std::vector<std::complex<double>> partial)
        : std::runtime_error(std::move(msg)), partial(std::move(partial)) {}
    std::vector<std::complex<double>> partial;
};

// All complex roots with multiplicity, each validated against
// |q(r)| <= 1e-8 * coefficient scale.
std::vector<std::complex<double>> poly_roots(const Poly& q, int max_iter = 400);

// Derivative-test hypothesis min |f^(p)| > 1 fails; `x` is a violating point.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(std::string msg, double x) : std::runtime_error(std::move(msg)), x(x) {}
    double x;
};

struct VdcRow {
    double lambda = 0.0;
    double rhs = 0.0;         // integral_term + endpoint_term (unit amplitude)
    double normalized = 0.0;  // rhs * |lambda|^(1/p) / degree
};

// Rate check for polynomial phases: with min |f^(p)| > 1 the bound's
// right-hand side should stay below degree * C_p * |lambda|^(-1/p), i.e. the
// normalized sequence has finite sup and no upward trend.
struct VdcRateReport {
    int p = 0;
    int degree = 0;
    double sup_normalized = 0.0;
    double rhs_slope = 0.0;    // fitted lambda exponent of the raw rhs
    double trend_slope = 0.0;  // fitted lambda exponent of the normalized rhs
    std::vector<VdcRow> rows;
    bool passed = false;
};

// Largest p <= degree with min |f^(p)| > 1 over [a, b]; 0 when none.
int auto_power(const Poly& f, double a, double b);

// p <= 0 selects auto_power. Throws HypothesisError when min |f^(p)| <= 1.
VdcRateReport verify_vdc_rate(const Poly& f, int p, double a, double b,
                              std::span<const double> lambdas, const QuadOptions& opts = {});

}  // namespace oscbound
