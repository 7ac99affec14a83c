#include "oscbound/vdc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oscbound/bound.hpp"
#include "oscbound/errors.hpp"
#include "oscbound/extrema.hpp"
#include "oscbound/fit.hpp"

namespace oscbound {

double Poly::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Jet Poly::jet(double x, int order) const {
    Jet acc = Jet::constant(0.0, order);
    Jet var = Jet::variable(x, order);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * var + Jet::constant(*it, order);
    return acc;
}

Poly Poly::derivative() const {
    Poly d;
    if (coeffs.size() <= 1) {
        d.coeffs = {0.0};
        return d;
    }
    d.coeffs.resize(coeffs.size() - 1);
    for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs[i - 1] = coeffs[i] * i;
    return d;
}

Poly Poly::derivative(int k) const {
    Poly d = *this;
    for (int i = 0; i < k; ++i) d = d.derivative();
    return d;
}

Poly Poly::scaled(double s) const {
    Poly r = *this;
    for (double& c : r.coeffs) c *= s;
    return r;
}

JetFn Poly::as_jetfn() const {
    Poly copy = *this;
    return [copy](double x, int order) { return copy.jet(x, order); };
}

std::string Poly::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        double c = coeffs[i];
        if (c == 0.0 && degree() > 0) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        double a = std::abs(c);
        if (i == 0 || a != 1.0) os << a;
        if (i >= 1) os << "x";
        if (i >= 2) os << "^" << i;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

std::vector<std::complex<double>> poly_roots(const Poly& q, int max_iter) {
    const int n = q.degree();
    if (n < 1) throw std::invalid_argument("poly_roots requires degree >= 1");
    if (q.coeffs.back() == 0.0) throw std::invalid_argument("leading coefficient must be nonzero");

    // monic normalization
    std::vector<std::complex<double>> c(n + 1);
    for (int i = 0; i <= n; ++i) c[i] = q.coeffs[i] / q.coeffs.back();

    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = 0.0;
        for (int i = n; i >= 0; --i) acc = acc * z + c[i];
        return acc;
    };

    // simultaneous (Weierstrass) iteration from a spiral of start points
    std::vector<std::complex<double>> r(n);
    std::complex<double> seed{0.4, 0.9};
    std::complex<double> acc{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
        acc *= seed;
        r[i] = acc;
    }

    bool converged = false;
    for (int it = 0; it < max_iter && !converged; ++it) {
        double max_step = 0.0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= r[i] - r[j];
            if (std::abs(denom) < 1e-300) denom = 1e-300;
            std::complex<double> step = eval(r[i]) / denom;
            r[i] -= step;
            max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(r[i])));
        }
        converged = max_step < 1e-14;
    }

    // residual validation against the original coefficient scale
    double cscale = 0.0;
    for (double v : q.coeffs) cscale = std::max(cscale, std::abs(v));
    for (const auto& root : r) {
        std::complex<double> acc2 = 0.0;
        for (int i = n; i >= 0; --i) acc2 = acc2 * root + q.coeffs[i];
        double scale = cscale * std::pow(std::max(1.0, std::abs(root)), n);
        if (!(std::abs(acc2) <= 1e-8 * scale))
            throw RootsError("poly_roots did not converge", r);
    }

    std::sort(r.begin(), r.end(), [](const auto& u, const auto& v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    return r;
}

int auto_power(const Poly& f, double a, double b) {
    for (int p = f.degree(); p >= 1; --p) {
        Poly d = f.derivative(p);
        double m = minimize_on([&d](double x) { return std::abs(d(x)); }, a, b).value;
        if (m > 1.0 - 1e-12) return p;
    }
    return 0;
}

VdcRateReport verify_vdc_rate(const Poly& f, int p, double a, double b,
                              std::span<const double> lambdas, const QuadOptions& opts) {
    if (lambdas.size() < 3) throw std::invalid_argument("need at least 3 lambdas");
    if (p <= 0) {
        p = auto_power(f, a, b);
        if (p == 0) throw HypothesisError("no derivative order has min |f^(p)| > 1", a);
    }
    if (p > f.degree()) throw std::invalid_argument("p exceeds the polynomial degree");

    Poly dp = f.derivative(p);
    Extremum lo = minimize_on([&dp](double x) { return std::abs(dp(x)); }, a, b);
    // |f^(p)| == 1 exactly is accepted as the boundary of the hypothesis
    if (!(lo.value > 1.0 - 1e-12)) {
        std::ostringstream os;
        os << "hypothesis min |f^(" << p << ")| > 1 fails at x = " << lo.x;
        throw HypothesisError(os.str(), lo.x);
    }

    JetFn fj = f.as_jetfn();
    JetFn one = [](double, int order) { return Jet::constant(1.0, order); };

    VdcRateReport rep;
    rep.p = p;
    rep.degree = f.degree();
    std::vector<std::pair<double, double>> rhs_samples, norm_samples;
    for (double lam : lambdas) {
        BoundReport br = uniform_bound(fj, one, a, b, lam, opts);
        VdcRow row;
        row.lambda = lam;
        row.rhs = br.integral_term + br.endpoint_term;
        row.normalized = row.rhs * std::pow(std::abs(lam), 1.0 / p) / rep.degree;
        rep.rows.push_back(row);
        rep.sup_normalized = std::max(rep.sup_normalized, row.normalized);
        rhs_samples.push_back({std::abs(lam), row.rhs});
        norm_samples.push_back({std::abs(lam), row.normalized});
    }
    rep.rhs_slope = decay_fit(rhs_samples).slope;
    rep.trend_slope = trend_slope(norm_samples);
    rep.passed = std::isfinite(rep.sup_normalized) && rep.trend_slope <= 0.05;
    return rep;
}

}  // namespace oscbound
