#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oscbound/calibration.hpp"
#include "oscbound/config.hpp"
#include "oscbound/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;  // 0 = keep the config's value
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config file")->required();
    sub->add_option("--out", args.out_dir, "output directory (default: current)");
    sub->add_option("--threads", args.threads, "worker threads (overrides the config)");
}

int run_kind(const std::string& kind, const CommonArgs& args) {
    oscbound::ExperimentConfig cfg = oscbound::parse_config_file(args.config_path);
    auto is_sweep = [](const std::string& k) { return k == "bound" || k == "sweep"; };
    if (cfg.kind != kind && !(is_sweep(cfg.kind) && is_sweep(kind))) {
        std::cerr << "error: config kind '" << cfg.kind << "' does not match subcommand '" << kind
                  << "'\n";
        return 1;
    }
    if (args.threads > 0) cfg.threads = args.threads;
    oscbound::RunResult r = oscbound::run_experiment(cfg, args.out_dir);
    std::cout << "csv: " << r.csv_path << "\nsummary: " << r.summary_path << "\n";
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscillatory-integral bound experiments"};
    app.require_subcommand(1);

    const char* kinds[] = {"eval", "bound", "sweep", "partition", "vdc", "multidim", "sublevel"};
    const char* descriptions[] = {
        "oscillatory integrals over a lambda grid",
        "bound functionals and validity ratios over a lambda grid",
        "alias of 'bound' for lambda sweeps",
        "G/H decomposition and interval classification",
        "polynomial rate verification",
        "box-integral decay pipeline (n = 2, 3)",
        "sublevel growth fit and envelope check",
    };

    CommonArgs args[7];
    for (int i = 0; i < 7; ++i) add_common(app.add_subcommand(kinds[i], descriptions[i]), args[i]);

    std::string calib_out = "calibration.txt";
    CLI::App* calib = app.add_subcommand("calibrate", "regenerate the calibration constants file");
    calib->add_option("--out", calib_out, "output path for the constants file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (calib->parsed()) {
            oscbound::CalibrationTable::compute().save(calib_out);
            std::cout << "wrote " << calib_out << "\n";
            return 0;
        }
        for (int i = 0; i < 7; ++i)
            if (app.get_subcommand(kinds[i])->parsed()) return run_kind(kinds[i], args[i]);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
