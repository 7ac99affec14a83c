#include "oscbound/calibration.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "oscbound/errors.hpp"
#include "oscbound/extrema.hpp"
#include "oscbound/quad.hpp"
#include "oscbound/sublevel.hpp"
#include "oscbound/vdc.hpp"

namespace oscbound {

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_key(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Direct integral of min(1, (lambda x^(1/delta))^-eps) over [0, 1]; the
// canonical family has sublevel measure exactly a^delta with C = M = 1.
double canonical_direct(double delta, double eps, double lambda) {
    auto g = [&](double x) {
        double t = lambda * std::pow(x, 1.0 / delta);
        if (t <= 0.0) return 1.0;
        double v = std::pow(t, -eps);
        return v < 1.0 ? v : 1.0;
    };
    QuadOptions opts;
    opts.tol_rel = 1e-11;
    opts.tol_abs = 1e-14;
    opts.initial_panels = 64;
    QuadResult r = integrate_adaptive(g, 0.0, 1.0, opts);
    return r.value;
}

}  // namespace

CalibrationTable CalibrationTable::compute() {
    CalibrationTable t;

    const std::vector<double> deltas{0.25, 0.5, 1.0, 2.0};
    const std::vector<double> epss{0.5, 1.0, 2.0};
    std::vector<double> lambdas;
    for (int k = 0; k <= 32; ++k) lambdas.push_back(std::pow(10.0, 0.25 * k));

    for (double delta : deltas) {
        for (double eps : epss) {
            double d_needed = 0.0;
            for (double lam : lambdas) {
                double direct = canonical_direct(delta, eps, lam);
                double need;
                if (std::abs(delta - eps) < 1e-12) {
                    double shape = (1.0 + std::max(0.0, std::log(lam))) * std::pow(lam, -delta);
                    need = direct / shape;
                } else if (delta < eps) {
                    need = direct / std::pow(lam, -delta);
                } else {
                    need = (direct - std::pow(lam, -delta)) / std::pow(lam, -eps);
                }
                d_needed = std::max(d_needed, need);
            }
            t.set(envelope_D_key(delta, eps), d_needed * 1.02);
        }
    }

    // c_p': worst measured ratio measure / (eps/B)^(1/p), with eps swept up
    // to the scale of |f| itself. The family mixes monomials, Chebyshev
    // shapes (the classical extremizers: |T_p| <= 1 on the whole interval
    // while T_p^(p) = 2^(p-1) p!), and seeded random polynomials.
    const std::vector<std::vector<double>> chebyshev{
        {0, 1},
        {-1, 0, 2},
        {0, -3, 0, 4},
        {1, 0, -8, 0, 8},
        {0, 5, 0, -20, 0, 16},
        {-1, 0, 18, 0, -48, 0, 32},
    };

    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next_unit = [&state]() {  // deterministic xorshift in [0, 1)
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };

    for (int p = 1; p <= 6; ++p) {
        double worst = 0.0;
        auto consider = [&](const Poly& f) {
            double b_min =
                minimize_on([&f, p](double x) { return std::abs(f.derivative(p)(x)); }, -1.0, 1.0)
                    .value;
            if (!(b_min > 1e-6)) return;
            double fmax =
                maximize_on([&f](double x) { return std::abs(f(x)); }, -1.0, 1.0).value;
            std::vector<double> eps_grid;
            for (int k = 0; k <= 14; ++k)
                eps_grid.push_back(fmax * std::pow(10.0, -6.0 + (6.0 + std::log10(4.0)) * k / 14.0));
            // the worst ratio sits at eps = sup|f|, where the sublevel set
            // jumps to the whole interval (the Chebyshev-shape extremum)
            eps_grid.push_back(fmax * (1.0 + 1e-9));
            for (double eps : eps_grid) {
                double meas = sublevel_measure_refined([&f](double x) { return f(x); }, -1.0, 1.0,
                                                       eps, 8192);
                if (meas <= 0.0) continue;
                worst = std::max(worst, meas / std::pow(eps / b_min, 1.0 / p));
            }
        };
        {
            Poly mono;
            mono.coeffs.assign(p + 1, 0.0);
            mono.coeffs[p] = 1.0;
            consider(mono);
            Poly cheb;
            cheb.coeffs = chebyshev[p - 1];
            consider(cheb);
        }
        for (int trial = 0; trial < 48; ++trial) {
            int deg = p + static_cast<int>(next_unit() * (6 - p + 1));
            if (deg > 6) deg = 6;
            Poly f;
            f.coeffs.resize(deg + 1);
            for (double& c : f.coeffs) c = -5.0 + 10.0 * next_unit();
            if (std::abs(f.coeffs.back()) < 0.25) f.coeffs.back() = 0.25;
            consider(f);
        }
        t.set(vdc_c_key(p), worst * 1.05);
    }

    return t;
}

CalibrationTable CalibrationTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EvalError("cannot open calibration file: " + path);
    CalibrationTable t;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) continue;
        t.kv_[key] = std::strtod(val.c_str(), nullptr);
    }
    if (t.kv_.empty()) throw EvalError("calibration file has no entries: " + path);
    return t;
}

void CalibrationTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw EvalError("cannot write calibration file: " + path);
    out << "# calibration constants; regenerate with: oscbound calibrate --out <path>\n";
    for (const auto& [k, v] : kv_) out << k << " = " << fmt_g(v) << "\n";
}

std::optional<double> CalibrationTable::get(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
}

double CalibrationTable::require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw EvalError("missing calibration key: " + key);
    return *v;
}

std::string CalibrationTable::envelope_D_key(double delta, double eps) {
    return "envelope_D_" + fmt_key(delta) + "_" + fmt_key(eps);
}

std::string CalibrationTable::vdc_c_key(int p) { return "vdc_cprime_" + std::to_string(p); }

}  // namespace oscbound
