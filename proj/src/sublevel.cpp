#include "oscbound/sublevel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oscbound/partition.hpp"

namespace oscbound {

Box Box::centered(int dim, double radius) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("box dimension must be 1..3");
    Box b;
    b.axes.assign(dim, {-radius, radius});
    return b;
}

double Box::measure() const {
    double m = 1.0;
    for (const auto& ax : axes) m *= ax[1] - ax[0];
    return m;
}

namespace {

int default_points_per_axis(int dim) {
    switch (dim) {
        case 1: return 1 << 18;
        case 2: return 1024;
        default: return 128;
    }
}

GrowthFit fit_from_values(std::vector<double> values, double total_measure,
                          std::vector<double> a_grid) {
    if (a_grid.size() < 3) throw std::invalid_argument("threshold grid needs >= 3 entries");
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
        if (!(a_grid[i] > 0.0)) throw std::invalid_argument("thresholds must be positive");
        if (i > 0 && !(a_grid[i] > a_grid[i - 1]))
            throw std::invalid_argument("thresholds must be strictly increasing");
    }

    GrowthFit fit;
    fit.a_grid = std::move(a_grid);

    double m_sup = 0.0;
    for (double v : values) m_sup = std::max(m_sup, v);
    fit.M = m_sup;

    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    fit.measures.reserve(fit.a_grid.size());
    for (double a : fit.a_grid) {
        auto it = std::lower_bound(values.begin(), values.end(), a);
        double count = static_cast<double>(it - values.begin());
        fit.measures.push_back(total_measure * count / n);
    }

    // log-log least squares over thresholds with nonzero measure
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < fit.a_grid.size(); ++i)
        if (fit.measures[i] > 0.0) pts.push_back({std::log(fit.a_grid[i]), std::log(fit.measures[i])});
    if (pts.size() < 3) {
        fit.degenerate = true;
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0.0, sxy = 0.0;
    for (auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 0.0)) {
        fit.degenerate = true;
        return fit;
    }
    fit.delta = sxy / sxx;
    double intercept = my - fit.delta * mx;
    double ss = 0.0;
    for (auto& [x, y] : pts) {
        double r = y - (intercept + fit.delta * x);
        ss += r * r;
    }
    fit.fit_residual = std::sqrt(ss / pts.size());

    // C makes measure <= C a^delta hold at every grid threshold
    double c = 0.0;
    for (std::size_t i = 0; i < fit.a_grid.size(); ++i)
        if (fit.measures[i] > 0.0)
            c = std::max(c, fit.measures[i] / std::pow(fit.a_grid[i], fit.delta));
    fit.C = c;
    return fit;
}

}  // namespace

GrowthFit estimate_growth(const std::function<double(std::span<const double>)>& g, const Box& box,
                          std::vector<double> a_grid, int points_per_axis) {
    const int dim = box.dim();
    const int n = points_per_axis > 0 ? points_per_axis : default_points_per_axis(dim);

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(std::pow(n, dim)));
    std::array<double, 3> pt{};
    auto coord = [&](int axis, int i) {
        return box.axes[axis][0] + (box.axes[axis][1] - box.axes[axis][0]) * (i + 0.5) / n;
    };
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            pt[0] = coord(0, i);
            values.push_back(std::abs(g(std::span(pt.data(), 1))));
        }
    } else if (dim == 2) {
        for (int i = 0; i < n; ++i) {
            pt[0] = coord(0, i);
            for (int j = 0; j < n; ++j) {
                pt[1] = coord(1, j);
                values.push_back(std::abs(g(std::span(pt.data(), 2))));
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            pt[0] = coord(0, i);
            for (int j = 0; j < n; ++j) {
                pt[1] = coord(1, j);
                for (int k = 0; k < n; ++k) {
                    pt[2] = coord(2, k);
                    values.push_back(std::abs(g(std::span(pt.data(), 3))));
                }
            }
        }
    }
    return fit_from_values(std::move(values), box.measure(), std::move(a_grid));
}

GrowthFit estimate_growth(const std::function<double(double)>& g, double lo, double hi,
                          std::vector<double> a_grid, int points) {
    if (!(lo < hi)) throw std::invalid_argument("estimate_growth requires lo < hi");
    std::vector<double> values;
    values.reserve(points);
    for (int i = 0; i < points; ++i)
        values.push_back(std::abs(g(lo + (hi - lo) * (i + 0.5) / points)));
    return fit_from_values(std::move(values), hi - lo, std::move(a_grid));
}

GrowthFit estimate_growth(const Expr& g, double lo, double hi, std::vector<double> a_grid,
                          int points) {
    return estimate_growth([&g](double x) { return g(x); }, lo, hi, std::move(a_grid), points);
}

double sublevel_envelope(double C, double delta, double eps, double M, double lambda, double D) {
    if (!(C > 0.0) || !(delta > 0.0) || !(eps > 0.0) || !(M > 0.0) || lambda == 0.0 || !(D > 0.0))
        throw std::invalid_argument("sublevel_envelope requires positive parameters");
    const double al = std::abs(lambda);
    auto log_plus = [](double x) { return x > 1.0 ? std::log(x) : 0.0; };
    if (std::abs(delta - eps) < 1e-12)
        return C * D * (1.0 + log_plus(M * al)) * std::pow(al, -delta);
    if (delta < eps) return C * D * std::pow(al, -delta);
    return C * (std::pow(al, -delta) + D * std::pow(al, -eps) * std::pow(M, delta - eps));
}

double vdc_sublevel_bound(double B, int p, double eps, double c_p_prime) {
    if (!(B > 0.0) || p < 1 || !(eps > 0.0) || !(c_p_prime > 0.0))
        throw std::invalid_argument("vdc_sublevel_bound requires positive arguments");
    return c_p_prime * std::pow(eps / B, 1.0 / p);
}

double sublevel_measure_refined(const std::function<double(double)>& g, double a, double b,
                                double eps, int grid_n) {
    auto h = [&](double x) { return std::abs(g(x)) - eps; };
    std::vector<RootHit> crossings = find_zeros(h, a, b, grid_n, 1e-13);
    std::vector<double> cuts{a};
    for (const auto& c : crossings)
        if (c.x > a && c.x < b) cuts.push_back(c.x);
    cuts.push_back(b);
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        if (std::abs(g(mid)) < eps) m += cuts[i + 1] - cuts[i];
    }
    return m;
}

}  // namespace oscbound
