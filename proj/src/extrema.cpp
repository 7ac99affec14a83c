#include "oscbound/extrema.hpp"

#include <cmath>
#include <stdexcept>

namespace oscbound {

namespace {

Extremum scan(const std::function<double(double)>& g, double a, double b, int n, int sign,
              bool polish) {
    if (!(a < b)) {
        // degenerate interval collapses to a point
        return {a, g(a)};
    }
    if (n < 2) n = 2;
    Extremum best{a, sign * g(a)};
    int best_i = 0;
    for (int i = 1; i <= n; ++i) {
        double x = a + (b - a) * i / n;
        double v = sign * g(x);
        if (v > best.value) {
            best = {x, v};
            best_i = i;
        }
    }
    if (polish) {
        double lo = a + (b - a) * std::max(0, best_i - 1) / n;
        double hi = a + (b - a) * std::min(n, best_i + 1) / n;
        const double invphi = 0.6180339887498949;
        const double tol = std::max(1e-14, 1e-10 * (b - a));
        double x1 = hi - invphi * (hi - lo);
        double x2 = lo + invphi * (hi - lo);
        double f1 = sign * g(x1), f2 = sign * g(x2);
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            if (f1 >= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = sign * g(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = sign * g(x2);
            }
        }
        double xm = 0.5 * (lo + hi);
        double vm = sign * g(xm);
        if (vm > best.value) best = {xm, vm};
    }
    best.value *= sign;
    return best;
}

}  // namespace

Extremum maximize_on(const std::function<double(double)>& g, double a, double b, int n) {
    return scan(g, a, b, n, +1, true);
}

Extremum minimize_on(const std::function<double(double)>& g, double a, double b, int n) {
    return scan(g, a, b, n, -1, true);
}

Extremum grid_max(const std::function<double(double)>& g, double a, double b, int n) {
    return scan(g, a, b, n, +1, false);
}

Extremum grid_min(const std::function<double(double)>& g, double a, double b, int n) {
    return scan(g, a, b, n, -1, false);
}

}  // namespace oscbound
