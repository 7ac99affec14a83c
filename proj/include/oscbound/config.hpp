#pragma once

#include <string>
#include <vector>

namespace oscbound {

// One experiment per file: flat key = value entries with optional [section]
// headers for readability. See docs/formats.md for the full key list.
struct ExperimentConfig {
    std::string kind;  // eval | bound | sweep | partition | vdc | multidim | sublevel

    // oscillatory problem
    std::string phase;
    std::string amplitude = "1";
    double a = -1.0;
    double b = 1.0;
    std::vector<double> lambdas;

    // sublevel
    std::string g_expr;
    std::vector<double> a_grid;
    double eps = 0.0;  // > 0 enables the envelope check

    // vdc
    std::vector<double> poly;  // ascending coefficients; empty = suite mode
    int vdc_p = 0;             // 0 = auto
    int suite = 0;
    unsigned seed = 42;
    int degree_min = 2;
    int degree_max = 6;

    // multidim
    int dim = 2;
    double radius = 1.0;

    // quadrature
    double tol_rel = 1e-8;
    double tol_abs = 1e-12;
    long max_panels = 20000;
    long osc_max_panels = 0;  // 0 = derived from lambda and the phase range

    // run
    int threads = 1;
    std::string calibration_path;
    std::string out_csv;      // default <kind>.csv
    std::string out_summary;  // default <kind>_summary.txt
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Grid helpers shared with the CLI: "dyadic E0 E1", "geometric LO HI N",
// "list v1 v2 ...".
std::vector<double> parse_grid_spec(const std::string& spec);

}  // namespace oscbound
