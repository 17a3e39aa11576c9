#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sr/campaign.hpp"

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symbolic-regression GP engine with pluggable selection operators"};
    app.require_subcommand(1);

    std::string data_root = env_or("SRGP_DATA_DIR", "");
    std::string registry;
    app.add_option("--data-root", data_root,
                   "Dataset root directory (default: $SRGP_DATA_DIR)");
    app.add_option("--registry", registry, "Dataset registry JSON");

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute a single evolutionary run");
    std::string run_config, run_dataset, run_out = "run_out";
    std::uint64_t run_seed = 1;
    run_cmd->add_option("--config", run_config, "Run config file (JSON)");
    run_cmd->add_option("--dataset", run_dataset,
                        "Dataset: registry name, csv path, or synthetic name@cases")
        ->required();
    run_cmd->add_option("--seed", run_seed, "Engine seed");
    run_cmd->add_option("--out", run_out, "Output directory");

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "Run a campaign grid (resumable)");
    std::string grid_config, grid_out = "campaign";
    int jobs = 1;
    grid_cmd->add_option("--config", grid_config, "Campaign config file (JSON)")->required();
    grid_cmd->add_option("--out", grid_out, "Campaign directory");
    grid_cmd->add_option("--jobs", jobs, "Parallel cells");

    // report
    auto* report_cmd = app.add_subcommand("report", "Aggregate a campaign directory");
    std::string report_dir = "campaign", baseline = "Ae-Lex";
    report_cmd->add_option("--campaign", report_dir, "Campaign directory");
    report_cmd->add_option("--baseline", baseline, "Baseline config id");

    // selbench
    auto* bench_cmd = app.add_subcommand("selbench", "Microbenchmark selection operators");
    std::size_t bn = 1000, bt = 256, bk = 1000, breps = 20;
    std::uint64_t bseed = 1;
    std::vector<std::string> bsel = {"Lex", "Ae-Lex", "Tourn/8", "BTS/8/16"};
    std::string bout;
    bench_cmd->add_option("--n", bn, "Population size");
    bench_cmd->add_option("--cases", bt, "Number of cases");
    bench_cmd->add_option("--k", bk, "Parents selected per call");
    bench_cmd->add_option("--reps", breps, "Timed repetitions");
    bench_cmd->add_option("--seed", bseed, "Seed for the synthetic error matrix");
    bench_cmd->add_option("--selectors", bsel, "Selector specs")->delimiter(',');
    bench_cmd->add_option("--out", bout, "Timing CSV path (default stdout)");

    // validate-data
    auto* validate_cmd =
        app.add_subcommand("validate-data", "Check registry datasets against expected shapes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (run_cmd->parsed())
        return sr::cmd_run(run_config, run_dataset, run_seed, run_out, registry, data_root);
    if (grid_cmd->parsed()) return sr::cmd_grid(grid_config, grid_out, jobs, registry, data_root);
    if (report_cmd->parsed()) return sr::cmd_report(report_dir, baseline);
    if (bench_cmd->parsed()) return sr::cmd_selbench(bn, bt, bk, bsel, breps, bseed, bout);
    if (validate_cmd->parsed()) return sr::cmd_validate_data(registry, data_root);
    return 1;
}
