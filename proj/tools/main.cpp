// qcrlab: command-line front end

#include <CLI11.hpp>

#include "qcrapp/runner.hpp"

int main(int argc, char** argv) {
    using namespace qcr::app;
    init_logging();

    CLI::App app{"Quantum-circuit refrigerator simulations driven by a JSON config"};
    RunOptions opt;
    std::string out;
    app.add_option("--config", opt.config_path, "run configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output CSV; a sidecar <out>.json is written beside it");
    app.add_option("--threads", opt.threads, "worker threads, 0 for all cores")->capture_default_str();
    app.add_option("--seed", opt.seed, "seed for synthetic measurement noise")->capture_default_str();

    auto* diff = app.add_subcommand("diff-lamb", "row-wise difference of two lamb-shift tables (a - b)");
    std::string csv_a, csv_b, diff_out;
    diff->add_option("a", csv_a, "lamb-shift CSV")->required()->check(CLI::ExistingFile);
    diff->add_option("b", csv_b, "reference lamb-shift CSV")->required()->check(CLI::ExistingFile);
    diff->add_option("--out", diff_out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (*diff) return run_diff_lamb(csv_a, csv_b, diff_out);
    if (opt.config_path.empty()) {
        std::fputs("--config is required\n", stderr);
        return kExitConfig;
    }
    if (!out.empty()) opt.out_path = out;
    return run(opt);
}
