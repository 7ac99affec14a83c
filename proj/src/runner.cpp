#include "oscbound/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oscbound/bound.hpp"
#include "oscbound/calibration.hpp"
#include "oscbound/errors.hpp"
#include "oscbound/fit.hpp"
#include "oscbound/multidim.hpp"
#include "oscbound/parallel.hpp"
#include "oscbound/partition.hpp"
#include "oscbound/quad.hpp"
#include "oscbound/rng.hpp"
#include "oscbound/sublevel.hpp"

namespace oscbound {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& name, std::string& path_out) {
    std::filesystem::path p = std::filesystem::path(dir) / name;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw EvalError("cannot write output file: " + p.string());
    path_out = p.string();
    return out;
}

std::string fit_line(const char* label, const DecayFit& fit) {
    std::ostringstream os;
    os << label << ": slope = " << g17(fit.slope) << "  stderr = " << g17(fit.stderr_slope)
       << "  n = " << fit.n_points;
    return os.str();
}

void write_partition_table(std::ostream& os, const Partition& part) {
    os << "partition: |G| = " << g17(part.g_measure()) << "  |H| = " << g17(part.h_measure())
       << "  coverage residual = "
       << g17((part.b - part.a) - (part.g_measure() + part.h_measure())) << "\n";
    os << "z points:";
    for (const auto& z : part.z) os << " " << g17(z.x) << (z.tangential ? "(t)" : "");
    os << "\n";
    for (const auto& iv : part.h_intervals) {
        os << "  H [" << g17(iv.c) << ", " << g17(iv.d) << "] " << tag_name(iv.tag)
           << "  sup|f'| = " << g17(iv.sup_fp) << "  inf|f'| = " << g17(iv.inf_fp) << "\n";
    }
}

struct OscRow {
    double lambda = 0.0;
    OscResult integral;
    BoundReport bound;
};

RunResult run_osc(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.phase.empty()) throw EvalError("config: '" + cfg.kind + "' needs a phase");
    if (cfg.lambdas.empty()) throw EvalError("config: '" + cfg.kind + "' needs a lambda grid");
    Expr f = Expr::parse(cfg.phase);
    Expr phi = Expr::parse(cfg.amplitude);
    if (!(cfg.a < cfg.b)) throw EvalError("config: requires a < b");

    std::vector<double> lambdas = cfg.lambdas;
    std::sort(lambdas.begin(), lambdas.end());

    PolyTypeCertificate cert = check_polytype(f, cfg.a, cfg.b);
    std::vector<double> j_points;
    if (!cert.valid) j_points = special_points(f, cfg.a, cfg.b);

    Partition part = classify(decompose(f, cfg.a, cfg.b), f);

    // phase range for the oscillation-aware panel budget
    double flo = f(cfg.a), fhi = flo;
    for (int i = 0; i <= 4096; ++i) {
        double v = f(cfg.a + (cfg.b - cfg.a) * i / 4096.0);
        flo = std::min(flo, v);
        fhi = std::max(fhi, v);
    }
    const double frange = fhi - flo;

    QuadOptions bopts;
    bopts.tol_rel = cfg.tol_rel;
    bopts.tol_abs = cfg.tol_abs;
    bopts.max_panels = cfg.max_panels;

    std::vector<OscRow> rows(lambdas.size());
    parallel_for(static_cast<int>(lambdas.size()), cfg.threads, [&](int i) {
        double lam = lambdas[i];
        QuadOptions oopts = bopts;
        oopts.max_panels =
            cfg.osc_max_panels > 0 ? cfg.osc_max_panels : osc_panel_budget(lam, frange, cfg.max_panels);
        OscRow& row = rows[i];
        row.lambda = lam;
        row.integral = oscillatory_integral([f](double x) { return f(x); },
                                            [phi](double x) { return phi(x); }, cfg.a, cfg.b, lam,
                                            oopts);
        row.bound = cert.valid ? uniform_bound(f, phi, cfg.a, cfg.b, lam, bopts)
                               : special_point_bound(f, phi, cfg.a, cfg.b, lam, bopts);
    });

    RunResult rr;
    {
        std::ofstream csv = open_out(out_dir, cfg.out_csv, rr.csv_path);
        csv << "lambda,re_I,im_I,abs_I,integral_term,endpoint_term,rhs_total,ratio\n";
        for (const auto& row : rows) {
            double abs_i = std::abs(row.integral.value);
            double ratio = row.bound.total > 0.0 ? abs_i / row.bound.total : 0.0;
            csv << g17(row.lambda) << ',' << g17(row.integral.value.real()) << ','
                << g17(row.integral.value.imag()) << ',' << g17(abs_i) << ','
                << g17(row.bound.integral_term) << ',' << g17(row.bound.endpoint_term) << ','
                << g17(row.bound.total) << ',' << g17(ratio) << "\n";
        }
    }

    // fits and the ratio-trend check
    std::vector<std::pair<double, double>> abs_pts, rhs_pts, ratio_pts;
    bool ratios_finite = true;
    for (const auto& row : rows) {
        double abs_i = std::abs(row.integral.value);
        if (abs_i > 0.0) abs_pts.push_back({std::abs(row.lambda), abs_i});
        if (row.bound.total > 0.0) rhs_pts.push_back({std::abs(row.lambda), row.bound.total});
        if (row.bound.total > 0.0 && abs_i > 0.0)
            ratio_pts.push_back({std::abs(row.lambda), abs_i / row.bound.total});
        else
            ratios_finite = false;
        ratios_finite = ratios_finite && std::isfinite(abs_i / row.bound.total);
    }

    bool check_ran = false, check_passed = true;
    double trend = 0.0;
    if (cfg.kind != "eval" && ratio_pts.size() >= 3) {
        check_ran = true;
        trend = trend_slope(ratio_pts);
        check_passed = ratios_finite && trend <= 0.05;
    }

    {
        std::ofstream sum = open_out(out_dir, cfg.out_summary, rr.summary_path);
        sum << "kind: " << cfg.kind << "\n";
        sum << "phase: " << f.to_string() << "\namplitude: " << phi.to_string() << "\ninterval: ["
            << g17(cfg.a) << ", " << g17(cfg.b) << "]\n";
        if (cert.valid) {
            sum << "bound: uniform (polynomial-type certificate: k = " << cert.k
                << ", A = " << g17(cert.A);
            if (cert.k == 1) sum << ", j = " << cert.j;
            sum << ")\n";
        } else {
            sum << "bound: special-point fallback (no derivative order certifies); points:";
            for (double x : j_points) sum << " " << g17(x);
            sum << "\n";
        }
        write_partition_table(sum, part);
        if (abs_pts.size() >= 3) sum << fit_line("decay |I|", decay_fit(abs_pts)) << "\n";
        if (rhs_pts.size() >= 3) sum << fit_line("decay rhs_total", decay_fit(rhs_pts)) << "\n";
        if (check_ran) {
            sum << "ratio trend slope (median pairwise): " << g17(trend)
                << "  (threshold 0.05)\n";
            sum << "check: " << (check_passed ? "PASS" : "FAIL") << "\n";
        } else {
            sum << "check: skipped\n";
        }
        for (const auto& row : rows) {
            if (!row.integral.converged)
                sum << "note: oscillatory quadrature not converged at lambda = "
                    << g17(row.lambda) << "\n";
            if (row.integral.accuracy_warning)
                sum << "warning: accuracy regime exceeded at lambda = " << g17(row.lambda) << "\n";
        }
    }
    rr.exit_code = (!check_ran || check_passed) ? 0 : 2;
    return rr;
}

RunResult run_partition(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.phase.empty()) throw EvalError("config: 'partition' needs a phase");
    Expr f = Expr::parse(cfg.phase);
    Partition part = classify(decompose(f, cfg.a, cfg.b), f);

    RunResult rr;
    {
        std::ofstream csv = open_out(out_dir, cfg.out_csv, rr.csv_path);
        csv << "c,d,tag,length,sup_fp,inf_fp,c_uncertainty,d_uncertainty\n";
        for (const auto& iv : part.h_intervals)
            csv << g17(iv.c) << ',' << g17(iv.d) << ',' << tag_name(iv.tag) << ','
                << g17(iv.d - iv.c) << ',' << g17(iv.sup_fp) << ',' << g17(iv.inf_fp) << ','
                << g17(iv.c_uncertainty) << ',' << g17(iv.d_uncertainty) << "\n";
    }
    {
        std::ofstream sum = open_out(out_dir, cfg.out_summary, rr.summary_path);
        sum << "kind: partition\nphase: " << f.to_string() << "\ninterval: [" << g17(cfg.a) << ", "
            << g17(cfg.b) << "]\n";
        write_partition_table(sum, part);
    }
    return rr;
}

RunResult run_sublevel(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.g_expr.empty()) throw EvalError("config: 'sublevel' needs g");
    if (cfg.a_grid.empty()) throw EvalError("config: 'sublevel' needs a_grid");
    Expr g = Expr::parse(cfg.g_expr);
    GrowthFit fit = estimate_growth(g, cfg.a, cfg.b, cfg.a_grid);

    RunResult rr;
    {
        std::ofstream csv = open_out(out_dir, cfg.out_csv, rr.csv_path);
        csv << "a,measure\n";
        for (std::size_t i = 0; i < fit.a_grid.size(); ++i)
            csv << g17(fit.a_grid[i]) << ',' << g17(fit.measures[i]) << "\n";
    }

    bool check_ran = false, check_passed = true;
    std::vector<std::array<double, 3>> env_rows;  // lambda, direct, envelope
    if (cfg.eps > 0.0) {
        if (cfg.lambdas.empty()) throw EvalError("config: envelope check needs a lambda grid");
        if (fit.degenerate) throw EvalError("sublevel: growth fit degenerate; no envelope");
        if (cfg.calibration_path.empty())
            throw EvalError("config: envelope check needs a calibration file");
        CalibrationTable cal = CalibrationTable::load(cfg.calibration_path);
        auto dval = cal.envelope_D(fit.delta, cfg.eps);
        if (!dval) {
            // fall back to the nearest tabulated growth exponent
            double best = -1.0, best_gap = 1e300;
            for (double cand : {0.25, 0.5, 1.0, 2.0}) {
                if (std::abs(cand - fit.delta) < best_gap &&
                    cal.envelope_D(cand, cfg.eps).has_value()) {
                    best = cand;
                    best_gap = std::abs(cand - fit.delta);
                }
            }
            if (best < 0.0) throw EvalError("calibration: no envelope constant for this (delta, eps)");
            dval = cal.envelope_D(best, cfg.eps);
        }
        check_ran = true;
        QuadOptions qo;
        qo.tol_rel = 1e-10;
        qo.tol_abs = 1e-14;
        qo.initial_panels = 64;
        for (double lam : cfg.lambdas) {
            auto integrand = [&](double x) {
                double t = std::abs(lam * g(x));
                if (t <= 0.0) return 1.0;
                double v = std::pow(t, -cfg.eps);
                return v < 1.0 ? v : 1.0;
            };
            double direct = integrate_adaptive(integrand, cfg.a, cfg.b, qo).value;
            double env = sublevel_envelope(fit.C, fit.delta, cfg.eps, fit.M, lam, *dval);
            env_rows.push_back({lam, direct, env});
            check_passed = check_passed && direct <= env;
        }
        std::string env_path;
        std::string env_name = cfg.out_csv;
        auto dot = env_name.rfind('.');
        env_name = (dot == std::string::npos ? env_name : env_name.substr(0, dot)) + "_envelope.csv";
        std::ofstream env_csv = open_out(out_dir, env_name, env_path);
        env_csv << "lambda,direct,envelope,dominated\n";
        for (const auto& row : env_rows)
            env_csv << g17(row[0]) << ',' << g17(row[1]) << ',' << g17(row[2]) << ','
                    << (row[1] <= row[2] ? 1 : 0) << "\n";
    }

    {
        std::ofstream sum = open_out(out_dir, cfg.out_summary, rr.summary_path);
        sum << "kind: sublevel\ng: " << g.to_string() << "\ninterval: [" << g17(cfg.a) << ", "
            << g17(cfg.b) << "]\n";
        if (fit.degenerate) {
            sum << "growth fit: degenerate (fewer than 3 thresholds with nonzero measure)\n";
        } else {
            sum << "growth fit: delta = " << g17(fit.delta) << "  C = " << g17(fit.C)
                << "  M = " << g17(fit.M) << "  residual = " << g17(fit.fit_residual) << "\n";
        }
        if (check_ran) sum << "envelope check: " << (check_passed ? "PASS" : "FAIL") << "\n";
    }
    rr.exit_code = (!check_ran || check_passed) ? 0 : 2;
    return rr;
}

RunResult run_vdc(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.lambdas.empty()) throw EvalError("config: 'vdc' needs a lambda grid");
    std::vector<double> lambdas = cfg.lambdas;
    std::sort(lambdas.begin(), lambdas.end());

    std::vector<Poly> polys;
    if (!cfg.poly.empty()) {
        Poly f;
        f.coeffs = cfg.poly;
        while (f.coeffs.size() > 1 && f.coeffs.back() == 0.0) f.coeffs.pop_back();
        if (f.degree() < 1) throw EvalError("config: vdc polynomial must have degree >= 1");
        polys.push_back(f);
    } else {
        int n = cfg.suite > 0 ? cfg.suite : 100;
        polys = random_poly_suite(n, cfg.seed, cfg.degree_min, cfg.degree_max);
    }

    QuadOptions opts;
    opts.tol_rel = cfg.tol_rel;
    opts.tol_abs = cfg.tol_abs;
    opts.max_panels = cfg.max_panels;

    std::vector<VdcRateReport> reports(polys.size());
    parallel_for(static_cast<int>(polys.size()), cfg.threads, [&](int i) {
        reports[i] = verify_vdc_rate(polys[i], cfg.vdc_p, cfg.a, cfg.b, lambdas, opts);
    });

    RunResult rr;
    int failed = 0;
    {
        std::ofstream csv = open_out(out_dir, cfg.out_csv, rr.csv_path);
        csv << "poly_id,p,l,lambda,rhs,normalized\n";
        for (std::size_t i = 0; i < reports.size(); ++i)
            for (const auto& row : reports[i].rows)
                csv << i << ',' << reports[i].p << ',' << reports[i].degree << ','
                    << g17(row.lambda) << ',' << g17(row.rhs) << ',' << g17(row.normalized)
                    << "\n";
    }
    {
        std::ofstream sum = open_out(out_dir, cfg.out_summary, rr.summary_path);
        sum << "kind: vdc\npolynomials: " << polys.size() << "\n";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto& rep = reports[i];
            if (!rep.passed) ++failed;
            sum << "poly " << i << ": " << polys[i].to_string() << "  p = " << rep.p
                << "  sup_normalized = " << g17(rep.sup_normalized)
                << "  trend = " << g17(rep.trend_slope) << "  "
                << (rep.passed ? "PASS" : "FAIL") << "\n";
        }
        sum << "failed: " << failed << " / " << reports.size() << "\n";
    }
    rr.exit_code = failed == 0 ? 0 : 2;
    return rr;
}

RunResult run_multidim(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.phase.empty()) throw EvalError("config: 'multidim' needs a phase");
    if (cfg.lambdas.empty()) throw EvalError("config: 'multidim' needs a lambda grid");
    BoxProblem p;
    p.f = Expr::parse(cfg.phase);
    p.phi = Expr::parse(cfg.amplitude);
    p.n = cfg.dim;
    p.r = cfg.radius;
    p.lambda_grid = cfg.lambdas;
    std::sort(p.lambda_grid.begin(), p.lambda_grid.end());

    std::vector<double> a_grid = cfg.a_grid;
    if (a_grid.empty())
        a_grid = parse_grid_spec("geometric 1e-4 1 17");

    QuadOptions opts;
    opts.tol_rel = cfg.tol_rel;
    opts.tol_abs = cfg.tol_abs;
    opts.max_panels = cfg.max_panels;

    BoxDecayReport rep = box_decay_report(p, a_grid, opts);

    RunResult rr;
    {
        std::ofstream csv = open_out(out_dir, cfg.out_csv, rr.csv_path);
        csv << "lambda,abs_J,envelope,avg_bound,env_ratio,avg_ratio,j_converged\n";
        for (const auto& row : rep.rows) {
            double er = row.envelope > 0.0 ? row.abs_j / row.envelope : 0.0;
            double ar = row.avg_bound > 0.0 ? row.abs_j / (rep.z_phi * row.avg_bound) : 0.0;
            csv << g17(row.lambda) << ',' << g17(row.abs_j) << ',' << g17(row.envelope) << ','
                << g17(row.avg_bound) << ',' << g17(er) << ',' << g17(ar) << ','
                << (row.j_converged ? 1 : 0) << "\n";
        }
    }
    {
        std::ofstream sum = open_out(out_dir, cfg.out_summary, rr.summary_path);
        sum << "kind: multidim\nphase: " << p.f.to_string() << "\namplitude: " << p.phi.to_string()
            << "\nbox: [-" << g17(p.r) << ", " << g17(p.r) << "]^" << p.n << "\n";
        const auto& e = rep.exponents;
        if (e.ratio_fit.degenerate)
            sum << "ratio growth: degenerate (effectively unbounded)\n";
        else
            sum << "ratio growth: delta1 = " << g17(e.ratio_fit.delta)
                << "  C1 = " << g17(e.ratio_fit.C) << "\n";
        if (e.sup_fit.degenerate)
            sum << "sup growth: degenerate (effectively unbounded)\n";
        else
            sum << "sup growth: delta2 = " << g17(e.sup_fit.delta) << "  C2 = " << g17(e.sup_fit.C)
                << "\n";
        sum << "z_phi = " << g17(rep.z_phi) << "\n";
        sum << "envelope constant = " << g17(rep.fitted_envelope_const)
            << "  trend = " << g17(rep.envelope_trend) << "  "
            << (rep.envelope_ok ? "PASS" : "FAIL") << "\n";
        sum << "averaged-bound constant = " << g17(rep.fitted_avg_const)
            << "  trend = " << g17(rep.avg_trend) << "  " << (rep.avg_ok ? "PASS" : "FAIL")
            << "\n";
    }
    rr.exit_code = (rep.envelope_ok && rep.avg_ok) ? 0 : 2;
    return rr;
}

}  // namespace

std::vector<Poly> random_poly_suite(int count, unsigned seed, int degree_min, int degree_max) {
    Rng rng(seed);
    std::vector<Poly> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        int deg = rng.uniform_int(degree_min, degree_max);
        Poly f;
        f.coeffs.resize(deg + 1);
        for (double& c : f.coeffs) c = rng.uniform(-5.0, 5.0);
        if (std::abs(f.coeffs.back()) < 0.25)
            f.coeffs.back() = f.coeffs.back() < 0 ? -0.25 : 0.25;
        double lead = 1.0;
        for (int i = 2; i <= deg; ++i) lead *= i;  // degree-th derivative = deg! * a_deg
        lead *= std::abs(f.coeffs.back());
        out.push_back(f.scaled(1.5 / lead));
    }
    return out;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.kind == "eval" || cfg.kind == "bound" || cfg.kind == "sweep")
        return run_osc(cfg, out_dir);
    if (cfg.kind == "partition") return run_partition(cfg, out_dir);
    if (cfg.kind == "sublevel") return run_sublevel(cfg, out_dir);
    if (cfg.kind == "vdc") return run_vdc(cfg, out_dir);
    if (cfg.kind == "multidim") return run_multidim(cfg, out_dir);
    throw EvalError("unknown experiment kind: " + cfg.kind);
}

}  // namespace oscbound
