#pragma once

#include <string>
#include <vector>

#include "oscbound/config.hpp"
#include "oscbound/vdc.hpp"

namespace oscbound {

struct RunResult {
    int exit_code = 0;  // 0 = pass, 2 = a configured check failed
    std::string csv_path;
    std::string summary_path;
};

// Executes one experiment: runs the configured computation, writes the CSV
// and the plain-text summary under out_dir, and reports the exit status.
// Errors (bad expressions, quadrature failures, missing files) are thrown;
// the CLI maps them to exit code 1.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Deterministic polynomial suite shared by the vdc runner and the test
// harness: degree in [degree_min, degree_max], coefficients in [-5, 5],
// rescaled so min |f^(degree)| = 1.5 on [-1, 1].
std::vector<Poly> random_poly_suite(int count, unsigned seed, int degree_min = 2,
                                    int degree_max = 6);

}  // namespace oscbound
