#include "oscbound/quad.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "oscbound/errors.hpp"

namespace oscbound {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK QK15 constants).
constexpr int kNodes = 15;
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void panel_nodes(double a, double b, double (&x)[kNodes]) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < 7; ++i) {
        x[i] = c - h * kXgk[i];
        x[14 - i] = c + h * kXgk[i];
    }
    x[7] = c;
}

template <typename V>
struct Panel {
    double a = 0.0, b = 0.0;
    V value{};
    double err = 0.0;
    int want_children = 0;  // oscillation pre-split request; 0 = none
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

// Globally adaptive quadrature shared by the real and complex paths.
// Phase 1 honors oscillation pre-split requests (want_children > 1); phase 2
// bisects the worst panel until the summed error estimates meet the target.
template <typename V, typename Eval>
bool adapt(const Eval& evaluate, double a, double b, const QuadOptions& opts, V& value_out,
           double& err_out, long& panels_out) {
    if (!(a < b)) throw std::invalid_argument("integration interval requires a < b");
    if (!(opts.tol_rel > 0.0) || !(opts.tol_abs > 0.0))
        throw std::invalid_argument("tolerances must be positive");

    long used = 0;
    std::deque<Panel<V>> work;
    std::vector<Panel<V>> settled;
    bool budget_hit = false;

    const int n0 = std::max(1, opts.initial_panels);
    for (int i = 0; i < n0; ++i) {
        double lo = a + (b - a) * i / n0;
        double hi = (i == n0 - 1) ? b : a + (b - a) * (i + 1) / n0;
        work.push_back(evaluate(lo, hi));
        ++used;
    }

    while (!work.empty()) {
        Panel<V> p = work.front();
        work.pop_front();
        int k = std::min(p.want_children, 1024);
        if (k > 1 && used + k <= opts.max_panels) {
            double w = (p.b - p.a) / k;
            if (w > 0.0 && p.a + w > p.a) {
                for (int i = 0; i < k; ++i) {
                    double lo = p.a + w * i;
                    double hi = (i == k - 1) ? p.b : p.a + w * (i + 1);
                    work.push_back(evaluate(lo, hi));
                    ++used;
                }
                continue;
            }
        }
        if (p.want_children > 1) budget_hit = true;  // could not honor the request
        p.want_children = 0;
        settled.push_back(p);
    }

    V value{};
    double err = 0.0;
    for (const auto& p : settled) {
        value += p.value;
        err += p.err;
    }

    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t i = 0; i < settled.size(); ++i) heap.push({settled[i].err, i});

    for (;;) {
        double tol = std::max(opts.tol_abs, opts.tol_rel * magnitude(value));
        if (err <= tol) break;
        if (used + 2 > opts.max_panels || heap.empty()) break;
        auto [k, idx] = heap.top();
        heap.pop();
        Panel<V>& cur = settled[idx];
        if (!(cur.b > cur.a) || k != cur.err) continue;  // stale entry
        double mid = 0.5 * (cur.a + cur.b);
        if (!(mid > cur.a && mid < cur.b)) continue;     // width exhausted
        Panel<V> left = evaluate(cur.a, mid);
        Panel<V> right = evaluate(mid, cur.b);
        left.want_children = right.want_children = 0;
        used += 2;
        value += left.value + right.value - cur.value;
        err += left.err + right.err - cur.err;
        cur.a = cur.b = 0.0;  // dead
        settled.push_back(left);
        heap.push({left.err, settled.size() - 1});
        settled.push_back(right);
        heap.push({right.err, settled.size() - 1});
    }

    // Deterministic final accumulation: live panels summed left to right.
    std::vector<const Panel<V>*> live;
    live.reserve(settled.size());
    for (const auto& p : settled)
        if (p.b > p.a) live.push_back(&p);
    std::sort(live.begin(), live.end(),
              [](const Panel<V>* x, const Panel<V>* y) { return x->a < y->a; });
    value = V{};
    err = 0.0;
    for (const auto* p : live) {
        value += p->value;
        err += p->err;
    }

    value_out = value;
    err_out = err;
    panels_out = used;
    double tol = std::max(opts.tol_abs, opts.tol_rel * magnitude(value));
    return !budget_hit && err <= tol;
}

}  // namespace

void PhaseProblem::validate() const {
    if (!(a < b)) throw std::invalid_argument("phase problem requires a < b");
    if (lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (lambda_grid[i] == 0.0) throw std::invalid_argument("lambda must be nonzero");
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
            throw std::invalid_argument("lambda grid must be strictly increasing");
    }
}

QuadResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                              const QuadOptions& opts) {
    auto evaluate = [&](double lo, double hi) {
        double xs[kNodes];
        panel_nodes(lo, hi, xs);
        const double h = 0.5 * (hi - lo);
        double k15 = 0.0, g7 = 0.0;
        for (int i = 0; i < kNodes; ++i) {
            double v = g(xs[i]);
            int sym = i < 8 ? i : 14 - i;
            k15 += kWgk[sym] * v;
            if (sym % 2 == 1 || sym == 7) g7 += kWg[sym / 2] * v;
        }
        Panel<double> p;
        p.a = lo;
        p.b = hi;
        p.value = h * k15;
        p.err = std::abs(h * (k15 - g7));
        if (std::isnan(p.value) || std::isnan(p.err)) throw EvalError("integrand produced NaN");
        return p;
    };
    QuadResult r;
    r.converged = adapt<double>(evaluate, a, b, opts, r.value, r.abs_error_estimate, r.panels_used);
    return r;
}

OscResult oscillatory_integral(const std::function<double(double)>& f,
                               const std::function<double(double)>& phi, double a, double b,
                               double lambda, const QuadOptions& opts) {
    if (lambda == 0.0) throw std::invalid_argument("lambda must be nonzero");
    const double max_phase_span = 8.0 * std::numbers::pi;

    auto evaluate = [&](double lo, double hi) {
        double xs[kNodes];
        panel_nodes(lo, hi, xs);
        const double h = 0.5 * (hi - lo);
        std::complex<double> k15{}, g7{};
        double fmin = std::numeric_limits<double>::infinity();
        double fmax = -fmin;
        for (int i = 0; i < kNodes; ++i) {
            double fx = f(xs[i]);
            fmin = std::min(fmin, fx);
            fmax = std::max(fmax, fx);
            std::complex<double> v = std::polar(1.0, lambda * fx) * phi(xs[i]);
            int sym = i < 8 ? i : 14 - i;
            k15 += kWgk[sym] * v;
            if (sym % 2 == 1 || sym == 7) g7 += kWg[sym / 2] * v;
        }
        Panel<std::complex<double>> p;
        p.a = lo;
        p.b = hi;
        p.value = h * k15;
        p.err = std::abs(h * (k15 - g7));
        double span = std::abs(lambda) * (fmax - fmin);
        p.want_children = span > max_phase_span
                              ? static_cast<int>(std::min(1024.0, std::ceil(span / max_phase_span)))
                              : 0;
        if (std::isnan(p.value.real()) || std::isnan(p.value.imag()))
            throw EvalError("integrand produced NaN");
        return p;
    };

    OscResult r;
    std::complex<double> v;
    r.converged =
        adapt<std::complex<double>>(evaluate, a, b, opts, v, r.abs_error_estimate, r.panels_used);
    r.value = v;

    // coarse derivative scan for the accuracy-regime warning
    const int n = 1024;
    double prev = f(a);
    double sup_fp = 0.0;
    const double h = (b - a) / n;
    for (int i = 1; i <= n; ++i) {
        double cur = f(a + i * h);
        sup_fp = std::max(sup_fp, std::abs(cur - prev) / h);
        prev = cur;
    }
    r.accuracy_warning = std::abs(lambda) * sup_fp * (b - a) > 1e9;
    return r;
}

OscResult oscillatory_integral(const PhaseProblem& p, double lambda, const QuadOptions& opts) {
    if (!(p.a < p.b)) throw std::invalid_argument("phase problem requires a < b");
    const Expr f = p.f;
    const Expr phi = p.phi;
    return oscillatory_integral([f](double x) { return f(x); }, [phi](double x) { return phi(x); },
                                p.a, p.b, lambda, opts);
}

long osc_panel_budget(double lambda, double phase_range, long floor_budget) {
    double need = std::abs(lambda) * std::abs(phase_range);  // ~1 panel per radian, with slack
    if (!std::isfinite(need) || need > 4e6) return std::max(floor_budget, 1L << 22);
    return std::max(floor_budget, static_cast<long>(need) + 4096);
}

}  // namespace oscbound
