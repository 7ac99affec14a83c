#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "oscbound/errors.hpp"

namespace oscbound {

// Truncated Taylor expansion of a scalar function along one variable.
// coeff(m) stores f^(m)(x0) / m!, so multiplication is a plain Cauchy
// product and plain evaluation is coeff(0).
class Jet {
public:
    static constexpr int kMaxOrder = 16;

    explicit Jet(int order = 0) : order_(clamp_order(order)) { c_.fill(0.0); }

    static Jet constant(double v, int order) {
        Jet j(order);
        j.c_[0] = v;
        return j;
    }

    // The active variable: value v, first derivative 1.
    static Jet variable(double v, int order) {
        Jet j(order);
        j.c_[0] = v;
        if (j.order_ >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return order_; }
    double value() const { return c_[0]; }
    double coeff(int m) const { return m <= order_ ? c_[m] : 0.0; }
    double& coeff(int m) { return c_[m]; }

    // m-th derivative, i.e. coeff(m) * m!.
    double derivative(int m) const {
        double f = 1.0;
        for (int i = 2; i <= m; ++i) f *= i;
        return coeff(m) * f;
    }

    Jet operator-() const {
        Jet r(order_);
        for (int m = 0; m <= order_; ++m) r.c_[m] = -c_[m];
        return r;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r(std::max(a.order_, b.order_));
        for (int m = 0; m <= r.order_; ++m) r.c_[m] = a.coeff(m) + b.coeff(m);
        return r;
    }

    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r(std::max(a.order_, b.order_));
        for (int m = 0; m <= r.order_; ++m) r.c_[m] = a.coeff(m) - b.coeff(m);
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(std::max(a.order_, b.order_));
        for (int m = 0; m <= r.order_; ++m) {
            double s = 0.0;
            for (int k = 0; k <= m; ++k) s += a.coeff(k) * b.coeff(m - k);
            r.c_[m] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        if (std::abs(b.value()) < kDivTol)
            throw DomainError("division by zero (|denominator| < 1e-300)");
        Jet r(std::max(a.order_, b.order_));
        for (int m = 0; m <= r.order_; ++m) {
            double s = a.coeff(m);
            for (int k = 0; k < m; ++k) s -= r.c_[k] * b.coeff(m - k);
            r.c_[m] = s / b.value();
        }
        return r;
    }

    friend Jet operator*(double s, const Jet& a) {
        Jet r(a.order_);
        for (int m = 0; m <= a.order_; ++m) r.c_[m] = s * a.c_[m];
        return r;
    }

private:
    static constexpr double kDivTol = 1e-300;

    static int clamp_order(int order) {
        if (order < 0 || order > kMaxOrder)
            throw EvalError("jet order out of range [0, 16]");
        return order;
    }

    int order_;
    std::array<double, kMaxOrder + 1> c_;
};

inline Jet exp(const Jet& u) {
    Jet r(u.order());
    r.coeff(0) = std::exp(u.value());
    for (int m = 1; m <= r.order(); ++m) {
        double s = 0.0;
        for (int k = 1; k <= m; ++k) s += k * u.coeff(k) * r.coeff(m - k);
        r.coeff(m) = s / m;
    }
    return r;
}

inline Jet log(const Jet& u) {
    if (!(u.value() > 0.0)) throw DomainError("log of non-positive value");
    Jet r(u.order());
    r.coeff(0) = std::log(u.value());
    for (int m = 1; m <= r.order(); ++m) {
        double s = u.coeff(m);
        for (int k = 1; k < m; ++k) s -= (static_cast<double>(k) / m) * r.coeff(k) * u.coeff(m - k);
        r.coeff(m) = s / u.value();
    }
    return r;
}

// sin and cos share the usual coupled recurrence; computing them together
// costs one pass.
inline void sincos(const Jet& u, Jet& s, Jet& c) {
    s = Jet(u.order());
    c = Jet(u.order());
    s.coeff(0) = std::sin(u.value());
    c.coeff(0) = std::cos(u.value());
    for (int m = 1; m <= u.order(); ++m) {
        double as = 0.0, ac = 0.0;
        for (int k = 1; k <= m; ++k) {
            as += k * u.coeff(k) * c.coeff(m - k);
            ac += k * u.coeff(k) * s.coeff(m - k);
        }
        s.coeff(m) = as / m;
        c.coeff(m) = -ac / m;
    }
}

inline Jet sin(const Jet& u) {
    Jet s, c;
    sincos(u, s, c);
    return s;
}

inline Jet cos(const Jet& u) {
    Jet s, c;
    sincos(u, s, c);
    return c;
}

inline Jet sqrt(const Jet& u) {
    if (u.value() < 0.0) throw DomainError("sqrt of negative value");
    if (u.order() >= 1 && u.value() < 1e-300)
        throw DomainError("sqrt not differentiable at 0");
    Jet r(u.order());
    r.coeff(0) = std::sqrt(u.value());
    for (int m = 1; m <= r.order(); ++m) {
        double s = u.coeff(m);
        for (int k = 1; k < m; ++k) s -= r.coeff(k) * r.coeff(m - k);
        r.coeff(m) = s / (2.0 * r.coeff(0));
    }
    return r;
}

// abs is applied outside of any differentiation in this codebase; asking for
// derivatives at the kink is an error rather than a silent sign choice.
inline Jet abs(const Jet& u) {
    if (u.order() >= 1 && std::abs(u.value()) < 1e-12)
        throw DomainError("abs not differentiable near 0");
    if (u.value() < 0.0) return -u;
    if (u.order() == 0) {
        Jet r(0);
        r.coeff(0) = std::abs(u.value());
        return r;
    }
    return u;
}

// Integer power by repeated (binary) multiplication; valid for any base.
inline Jet powi(const Jet& u, long long n) {
    if (n == 0) return Jet::constant(1.0, u.order());
    if (n < 0) return Jet::constant(1.0, u.order()) / powi(u, -n);
    Jet acc = Jet::constant(1.0, u.order());
    Jet base = u;
    long long e = n;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

// Real power via exp(q log u); requires a positive base.
inline Jet pow(const Jet& u, double q) {
    double rq = std::round(q);
    if (std::abs(q - rq) <= 1e-12 && std::abs(rq) < 1e9)
        return powi(u, static_cast<long long>(rq));
    if (!(u.value() > 0.0))
        throw DomainError("real power of non-positive base");
    return exp(Jet::constant(q, u.order()) * log(u));
}

}  // namespace oscbound
