#pragma once

// Brute-force oracles shared by the test suites. These stay independent of
// the adaptive quadrature and root-finding paths they are used to check.

#include <cmath>
#include <complex>
#include <functional>

namespace oracles {

// composite midpoint rule
inline double riemann(const std::function<double(double)>& g, double a, double b, long n) {
    const double h = (b - a) / n;
    double acc = 0.0;
    for (long i = 0; i < n; ++i) acc += g(a + (i + 0.5) * h);
    return acc * h;
}

inline std::complex<double> riemann_osc(const std::function<double(double)>& f,
                                        const std::function<double(double)>& phi, double a,
                                        double b, double lambda, long n) {
    const double h = (b - a) / n;
    std::complex<double> acc{0.0, 0.0};
    for (long i = 0; i < n; ++i) {
        double x = a + (i + 0.5) * h;
        acc += std::polar(phi(x), lambda * f(x));
    }
    return acc * h;
}

// exact linear-phase integral of e^{i lambda x} over [a, b]
inline std::complex<double> linear_phase(double lambda, double a, double b) {
    const std::complex<double> i{0.0, 1.0};
    return (std::exp(i * lambda * b) - std::exp(i * lambda * a)) / (i * lambda);
}

}  // namespace oracles
