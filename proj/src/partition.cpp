#include "oscbound/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscbound/errors.hpp"
#include "oscbound/extrema.hpp"

namespace oscbound {

namespace {

constexpr double kTangentialTol = 1e-10;

int sgn(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

double bisect_sign_change(const std::function<double(double)>& g, double lo, double hi, int slo,
                          double tol) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        int sm = sgn(g(mid));
        if (sm == 0) return mid;
        if (sm == slo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// golden-section minimization of g on [lo, hi]
double golden_min(const std::function<double(double)>& g, double lo, double hi, double tol) {
    const double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = g(x2);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<RootHit> find_zeros(const std::function<double(double)>& g, double a, double b,
                                int grid_n, double tol) {
    if (!(a < b)) throw std::invalid_argument("find_zeros requires a < b");
    if (grid_n < 64) throw std::invalid_argument("find_zeros requires grid_n >= 64");

    const int n = grid_n;
    std::vector<double> xs(n + 1), vals(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = a + (b - a) * i / n;
        vals[i] = g(xs[i]);
        if (std::isnan(vals[i])) throw EvalError("find_zeros: NaN sample");
    }

    double max_abs = 0.0;
    for (double v : vals) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs < kTangentialTol) return {};  // identically zero at grid resolution

    std::vector<RootHit> out;
    std::vector<int> s(n + 1);
    for (int i = 0; i <= n; ++i) s[i] = sgn(vals[i]);

    // exact-zero samples
    for (int i = 0; i <= n; ++i) {
        if (s[i] == 0) {
            bool change = i > 0 && i < n && s[i - 1] * s[i + 1] < 0;
            out.push_back({xs[i], !change});
        }
    }
    // sign-change cells
    for (int i = 0; i < n; ++i) {
        if (s[i] * s[i + 1] < 0)
            out.push_back({bisect_sign_change(g, xs[i], xs[i + 1], s[i], tol), false});
    }
    // tangential zeros: local minima of |g| under the threshold
    for (int i = 0; i <= n; ++i) {
        if (s[i] == 0 || std::abs(vals[i]) >= kTangentialTol) continue;
        double left = i > 0 ? std::abs(vals[i - 1]) : std::numeric_limits<double>::infinity();
        double right = i < n ? std::abs(vals[i + 1]) : std::numeric_limits<double>::infinity();
        if (std::abs(vals[i]) <= left && std::abs(vals[i]) <= right) {
            double lo = i > 0 ? xs[i - 1] : xs[i];
            double hi = i < n ? xs[i + 1] : xs[i];
            double x = lo < hi ? golden_min([&](double t) { return std::abs(g(t)); }, lo, hi, tol)
                               : xs[i];
            out.push_back({x, true});
        }
    }

    std::sort(out.begin(), out.end(), [](const RootHit& u, const RootHit& v) { return u.x < v.x; });
    // merge hits closer than a grid cell; a sign-change wins over tangential
    std::vector<RootHit> merged;
    const double merge_tol = std::max(tol * 8, (b - a) / n * 0.5);
    for (const auto& h : out) {
        if (!merged.empty() && std::abs(h.x - merged.back().x) < merge_tol) {
            if (!h.tangential) merged.back() = h;
        } else {
            merged.push_back(h);
        }
    }
    return merged;
}

const char* tag_name(IntervalTag t) {
    switch (t) {
        case IntervalTag::Type1: return "type1";
        case IntervalTag::Type2A: return "type2A";
        case IntervalTag::Type2B: return "type2B";
        case IntervalTag::Type2Full: return "type2full";
        default: return "untyped";
    }
}

double Partition::g_measure() const {
    double m = 0.0;
    for (const auto& p : g_set) m += p.second - p.first;
    return m;
}

double Partition::h_measure() const {
    double m = 0.0;
    for (const auto& iv : h_intervals) m += iv.d - iv.c;
    return m;
}

Partition decompose(const JetFn& f, double a, double b, int grid_n) {
    if (!(a < b)) throw std::invalid_argument("decompose requires a < b");
    JetFn fn = f;

    auto fprime = [&fn](double x) { return fn(x, 1).derivative(1); };
    auto ratio = [&fn](double x) {
        Jet j = fn(x, 2);
        double f1 = j.derivative(1);
        double f2 = j.derivative(2);
        double d = f1 * f1;
        if (d < 1e-300) return std::numeric_limits<double>::infinity();
        return std::abs(f2) / d;
    };

    Partition part;
    part.a = a;
    part.b = b;

    std::vector<RootHit> zeros = find_zeros(fprime, a, b, grid_n, 1e-12);
    part.z.push_back({a, false});
    for (const auto& z : zeros)
        if (z.x > a && z.x < b) part.z.push_back(z);
    part.z.push_back({b, false});

    // node set: uniform grid plus pinch points around each zero of f'
    const double h = (b - a) / grid_n;
    std::vector<double> nodes;
    nodes.reserve(grid_n + 1 + 3 * zeros.size());
    for (int i = 0; i <= grid_n; ++i) nodes.push_back(a + (b - a) * i / grid_n);
    for (const auto& z : zeros) {
        for (double x : {z.x - h / 1024.0, z.x, z.x + h / 1024.0})
            if (x > a && x < b) nodes.push_back(x);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const int m = static_cast<int>(nodes.size());
    std::vector<double> rv(m);
    for (int i = 0; i < m; ++i) rv[i] = ratio(nodes[i]);

    auto in_h = [&](int i) { return rv[i] < 1.0; };
    auto ratio_m1 = [&](double x) { return ratio(x) - 1.0; };

    int i = 0;
    while (i < m) {
        if (!in_h(i)) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < m && in_h(j + 1)) ++j;

        HInterval iv;
        if (i == 0) {
            iv.c = a;
            iv.c_uncertainty = 0.0;
        } else {
            // ratio >= 1 at nodes[i-1], < 1 at nodes[i]
            iv.c = bisect_sign_change(ratio_m1, nodes[i - 1], nodes[i],
                                      sgn(ratio_m1(nodes[i - 1])), 1e-12);
            iv.c_uncertainty = 1e-12;
            if (std::abs(rv[i - 1] - 1.0) < 1e-9 && std::abs(rv[i] - 1.0) < 1e-9)
                iv.c_uncertainty = nodes[i] - nodes[i - 1];  // tangential crossing
        }
        if (j == m - 1) {
            iv.d = b;
            iv.d_uncertainty = 0.0;
        } else {
            iv.d = bisect_sign_change(ratio_m1, nodes[j], nodes[j + 1], sgn(ratio_m1(nodes[j])),
                                      1e-12);
            iv.d_uncertainty = 1e-12;
            if (std::abs(rv[j] - 1.0) < 1e-9 && std::abs(rv[j + 1] - 1.0) < 1e-9)
                iv.d_uncertainty = nodes[j + 1] - nodes[j];
        }
        if (iv.d > iv.c) part.h_intervals.push_back(iv);
        i = j + 1;
    }

    // G is the closed complement of the H intervals.
    double prev = a;
    for (const auto& iv : part.h_intervals) {
        part.g_set.push_back({prev, iv.c});
        prev = iv.d;
    }
    part.g_set.push_back({prev, b});

    return part;
}

Partition decompose(const Expr& f, double a, double b, int grid_n) {
    return decompose(as_jetfn(f), a, b, grid_n);
}

void classify(Partition& part, const JetFn& f) {
    JetFn fn = f;
    auto abs_fp = [&fn](double x) { return std::abs(fn(x, 1).derivative(1)); };
    for (auto& iv : part.h_intervals) {
        Extremum hi = maximize_on(abs_fp, iv.c, iv.d, 256);
        Extremum lo = minimize_on(abs_fp, iv.c, iv.d, 256);
        iv.sup_fp = hi.value;
        iv.inf_fp = lo.value;
        if (iv.sup_fp > 2.0 * iv.inf_fp)
            iv.tag = IntervalTag::Type1;
        else if (iv.c == part.a && iv.d == part.b)
            iv.tag = IntervalTag::Type2Full;
        else if ((iv.c == part.a) != (iv.d == part.b))
            iv.tag = IntervalTag::Type2A;
        else
            iv.tag = IntervalTag::Type2B;
    }
}

Partition classify(Partition part, const Expr& f) {
    classify(part, as_jetfn(f));
    return part;
}

int monotone_piece_count(const JetFn& f, double a, double b, int grid_n) {
    JetFn fn = f;
    auto fpp = [&fn](double x) { return fn(x, 2).derivative(2); };
    std::vector<RootHit> zeros = find_zeros(fpp, a, b, grid_n, 1e-12);
    int changes = 0;
    for (const auto& z : zeros)
        if (!z.tangential && z.x > a && z.x < b) ++changes;
    return 1 + changes;
}

int monotone_piece_count(const Expr& f, double a, double b, int grid_n) {
    return monotone_piece_count(as_jetfn(f), a, b, grid_n);
}

}  // namespace oscbound
