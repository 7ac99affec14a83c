#include "oscbound/bound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oscbound/errors.hpp"
#include "oscbound/extrema.hpp"
#include "oscbound/partition.hpp"

namespace oscbound {

namespace {

constexpr double kSmallDerivative = 1e-14;

// Quadrature setup for the capped-ratio integrals: a spread of initial
// panels so narrow active-cap regions at large lambda are not missed.
QuadOptions bound_quad_opts(const QuadOptions& base) {
    QuadOptions o = base;
    o.initial_panels = std::max(o.initial_panels, 16);
    return o;
}

double capped_ratio(const JetFn& f, double x, double lambda) {
    Jet j = f(x, 2);
    double f1 = j.derivative(1);
    double f2 = j.derivative(2);
    if (std::abs(f1) < kSmallDerivative) return 1.0;
    double r = std::abs(f2) / (std::abs(lambda) * f1 * f1);
    return r < 1.0 ? r : 1.0;
}

}  // namespace

PolyTypeCertificate check_polytype(const JetFn& f, double a, double b, int k_max, double a_cap,
                                   int grid_n) {
    if (k_max < 1 || k_max > Jet::kMaxOrder)
        throw std::invalid_argument("check_polytype requires 1 <= k_max <= 16");
    if (!(a_cap > 1.0)) throw std::invalid_argument("check_polytype requires a_cap > 1");

    PolyTypeCertificate cert;
    JetFn fn = f;
    for (int k = 1; k <= k_max; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        bool usable = true;
        for (int i = 0; i <= grid_n; ++i) {
            double x = a + (b - a) * i / grid_n;
            double v;
            try {
                v = std::abs(f(x, k).derivative(k));
            } catch (const DomainError&) {
                usable = false;
                break;
            }
            if (std::isnan(v)) {
                usable = false;
                break;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!usable || !(lo > 0.0) || !std::isfinite(hi)) continue;
        // the hypothesis needs f^(k) nonzero on all of [a, b]; a grid min
        // cannot see a zero between samples, so screen with the root finder
        if (!find_zeros([&fn, k](double x) { return fn(x, k).derivative(k); }, a, b, grid_n)
                 .empty())
            continue;
        double ratio = hi / lo;
        if (ratio < a_cap) {
            cert.k = k;
            cert.A = 2.0 * ratio;
            cert.j = (k == 1) ? monotone_piece_count(f, a, b, grid_n) : 0;
            cert.valid = true;
            return cert;
        }
    }
    return cert;  // valid == false
}

PolyTypeCertificate check_polytype(const Expr& f, double a, double b, int k_max, double a_cap,
                                   int grid_n) {
    return check_polytype(as_jetfn(f), a, b, k_max, a_cap, grid_n);
}

double amplitude_norm(const JetFn& phi, double a, double b, const QuadOptions& opts) {
    JetFn fn = phi;
    double sup = maximize_on([&fn](double x) { return std::abs(fn(x, 0).value()); }, a, b).value;
    auto dphi = [&fn](double x) { return std::abs(fn(x, 1).derivative(1)); };
    QuadResult q = integrate_adaptive(dphi, a, b, bound_quad_opts(opts));
    if (!q.converged) throw EvalError("amplitude_norm: quadrature did not converge");
    return sup + q.value;
}

double amplitude_norm(const Expr& phi, double a, double b, const QuadOptions& opts) {
    return amplitude_norm(as_jetfn(phi), a, b, opts);
}

namespace {

BoundReport assemble(const JetFn& f, const JetFn& phi, double a, double b, double lambda,
                     double endpoint_term, std::vector<double> j_points,
                     const QuadOptions& opts) {
    JetFn fn = f;
    auto integrand = [&fn, lambda](double x) { return capped_ratio(fn, x, lambda); };
    QuadResult q = integrate_adaptive(integrand, a, b, bound_quad_opts(opts));

    BoundReport r;
    r.integral_term = q.value;
    r.endpoint_term = std::min(b - a, endpoint_term);
    r.amplitude_norm = amplitude_norm(phi, a, b, opts);
    r.total = r.amplitude_norm * (r.integral_term + r.endpoint_term);
    r.j_points = std::move(j_points);
    r.converged = q.converged;
    return r;
}

}  // namespace

BoundReport uniform_bound(const JetFn& f, const JetFn& phi, double a, double b, double lambda,
                          const QuadOptions& opts) {
    if (lambda == 0.0) throw std::invalid_argument("lambda must be nonzero");
    JetFn fn = f;
    double sup_fp =
        maximize_on([&fn](double x) { return std::abs(fn(x, 1).derivative(1)); }, a, b).value;
    double endpoint = sup_fp > 0.0 ? 1.0 / (std::abs(lambda) * sup_fp)
                                   : std::numeric_limits<double>::infinity();
    return assemble(f, phi, a, b, lambda, endpoint, {}, opts);
}

BoundReport uniform_bound(const Expr& f, const Expr& phi, double a, double b, double lambda,
                          const QuadOptions& opts) {
    return uniform_bound(as_jetfn(f), as_jetfn(phi), a, b, lambda, opts);
}

std::vector<double> special_points(const JetFn& f, double a, double b, int grid_n) {
    JetFn fn = f;
    std::vector<double> pts{a, b};
    auto f2 = [&fn](double x) { return fn(x, 2).derivative(2); };
    auto f3 = [&fn](double x) { return fn(x, 3).derivative(3); };
    for (const auto& z : find_zeros(f2, a, b, grid_n)) pts.push_back(z.x);
    for (const auto& z : find_zeros(f3, a, b, grid_n)) pts.push_back(z.x);

    std::vector<double> out;
    for (double x : pts) {
        double fp = fn(x, 1).derivative(1);
        if (std::abs(fp) > kSmallDerivative) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    const double tol = 1e-9 * (b - a);
    out.erase(std::unique(out.begin(), out.end(),
                          [tol](double u, double v) { return std::abs(u - v) < tol; }),
              out.end());
    return out;
}

std::vector<double> special_points(const Expr& f, double a, double b, int grid_n) {
    return special_points(as_jetfn(f), a, b, grid_n);
}

BoundReport special_point_bound(const JetFn& f, const JetFn& phi, double a, double b,
                                double lambda, const QuadOptions& opts) {
    if (lambda == 0.0) throw std::invalid_argument("lambda must be nonzero");
    JetFn fn = f;
    std::vector<double> pts = special_points(fn, a, b);
    double sum = 0.0;
    for (double x : pts) sum += 1.0 / (std::abs(lambda) * std::abs(fn(x, 1).derivative(1)));
    return assemble(f, phi, a, b, lambda, sum, std::move(pts), opts);
}

BoundReport special_point_bound(const Expr& f, const Expr& phi, double a, double b, double lambda,
                                const QuadOptions& opts) {
    return special_point_bound(as_jetfn(f), as_jetfn(phi), a, b, lambda, opts);
}

double critical_point_contribution(double beta, int p, double lambda) {
    if (beta == 0.0 || lambda == 0.0 || p < 1)
        throw std::invalid_argument("critical_point_contribution requires beta != 0, p >= 1, lambda != 0");
    double e = -1.0 / (p + 1);
    return std::pow(std::abs(beta), e) * std::pow(std::abs(lambda), e);
}

}  // namespace oscbound
