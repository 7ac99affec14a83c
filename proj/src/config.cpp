#include "oscbound/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oscbound/errors.hpp"
#include "oscbound/expr.hpp"

namespace oscbound {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw EvalError("config: bad numeric value for '" + key + "': " + s);
    return v;
}

long to_long(const std::string& s, const std::string& key) {
    return static_cast<long>(to_double(s, key));
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    auto toks = split_ws(spec);
    if (toks.empty()) throw EvalError("empty grid spec");
    std::vector<double> out;
    if (toks[0] == "dyadic") {
        if (toks.size() != 3) throw EvalError("dyadic grid spec needs: dyadic E0 E1");
        int e0 = static_cast<int>(to_double(toks[1], "dyadic"));
        int e1 = static_cast<int>(to_double(toks[2], "dyadic"));
        if (e1 < e0) throw EvalError("dyadic grid spec needs E0 <= E1");
        for (int e = e0; e <= e1; ++e) out.push_back(std::pow(2.0, e));
    } else if (toks[0] == "geometric") {
        if (toks.size() != 4) throw EvalError("geometric grid spec needs: geometric LO HI N");
        double lo = to_double(toks[1], "geometric");
        double hi = to_double(toks[2], "geometric");
        int n = static_cast<int>(to_double(toks[3], "geometric"));
        if (!(lo > 0.0) || !(hi > lo) || n < 2)
            throw EvalError("geometric grid spec needs 0 < LO < HI and N >= 2");
        for (int i = 0; i < n; ++i)
            out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    } else if (toks[0] == "list") {
        for (std::size_t i = 1; i < toks.size(); ++i) out.push_back(to_double(toks[i], "list"));
        if (out.empty()) throw EvalError("list grid spec is empty");
    } else {
        throw EvalError("unknown grid spec kind: " + toks[0]);
    }
    return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_kind = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') continue;  // section headers are organizational
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw EvalError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw EvalError("config line " + std::to_string(lineno) + ": empty key or value");

        if (key == "kind") {
            cfg.kind = val;
            saw_kind = true;
        } else if (key == "phase") {
            cfg.phase = val;
        } else if (key == "amplitude") {
            cfg.amplitude = val;
        } else if (key == "a") {
            cfg.a = to_double(val, key);
        } else if (key == "b") {
            cfg.b = to_double(val, key);
        } else if (key == "lambda") {
            cfg.lambdas = parse_grid_spec(val);
        } else if (key == "g") {
            cfg.g_expr = val;
        } else if (key == "a_grid") {
            cfg.a_grid = parse_grid_spec(val);
        } else if (key == "eps") {
            cfg.eps = to_double(val, key);
        } else if (key == "poly") {
            cfg.poly.clear();
            for (const auto& t : split_ws(val)) cfg.poly.push_back(to_double(t, key));
        } else if (key == "p") {
            cfg.vdc_p = static_cast<int>(to_double(val, key));
        } else if (key == "suite") {
            cfg.suite = static_cast<int>(to_double(val, key));
        } else if (key == "seed") {
            cfg.seed = static_cast<unsigned>(to_double(val, key));
        } else if (key == "degree_min") {
            cfg.degree_min = static_cast<int>(to_double(val, key));
        } else if (key == "degree_max") {
            cfg.degree_max = static_cast<int>(to_double(val, key));
        } else if (key == "n") {
            cfg.dim = static_cast<int>(to_double(val, key));
        } else if (key == "radius") {
            cfg.radius = to_double(val, key);
        } else if (key == "tol_rel") {
            cfg.tol_rel = to_double(val, key);
        } else if (key == "tol_abs") {
            cfg.tol_abs = to_double(val, key);
        } else if (key == "max_panels") {
            cfg.max_panels = to_long(val, key);
        } else if (key == "osc_max_panels") {
            cfg.osc_max_panels = to_long(val, key);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(to_double(val, key));
        } else if (key == "calibration") {
            cfg.calibration_path = val;
        } else if (key == "csv") {
            cfg.out_csv = val;
        } else if (key == "summary") {
            cfg.out_summary = val;
        } else {
            throw EvalError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!saw_kind) throw EvalError("config: missing 'kind'");

    static const char* kinds[] = {"eval", "bound", "sweep", "partition", "vdc", "multidim", "sublevel"};
    bool ok = false;
    for (const char* k : kinds) ok = ok || cfg.kind == k;
    if (!ok) throw EvalError("config: unknown kind '" + cfg.kind + "'");

    // early expression validation so bad configs fail before any computation
    if (!cfg.phase.empty()) Expr::parse(cfg.phase);
    if (!cfg.amplitude.empty()) Expr::parse(cfg.amplitude);
    if (!cfg.g_expr.empty()) Expr::parse(cfg.g_expr);
    for (double lam : cfg.lambdas)
        if (lam == 0.0) throw EvalError("config: lambda grid contains zero");

    if (cfg.out_csv.empty()) cfg.out_csv = cfg.kind + ".csv";
    if (cfg.out_summary.empty()) cfg.out_summary = cfg.kind + "_summary.txt";
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EvalError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace oscbound
