#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sr/analysis.hpp"
#include "sr/engine.hpp"

namespace sr {

// Declarative experiment description. An empty config file reproduces the
// stock full-scale settings: 25 runs of population 1000 for 1000
// generations, the Ae-Lex baseline, a Tourn/ts ladder, and the full
// BTS/BTSS grid over batch and tournament sizes {2,4,8,16,32,64,128} with
// shuffle on and off.
struct CampaignConfig {
    std::vector<std::string> datasets;  // registry names, csv paths, or "poly2@600"
    std::vector<std::string> selectors = {"Ae-Lex"};
    std::vector<std::size_t> batch_sizes = {2, 4, 8, 16, 32, 64, 128};
    std::vector<std::size_t> tourn_sizes = {2, 4, 8, 16, 32, 64, 128};
    std::vector<bool> shuffle = {false, true};
    bool tournament_grid = true;
    std::size_t runs = 25;
    std::uint64_t master_seed = 1;

    std::size_t population = 1000;
    std::size_t generations = 1000;
    VariationConfig variation;

    int n_folds = 5;
    int fold_index = 0;
    bool normalize = true;
    std::uint64_t data_seed = 1;
    std::string target_column;  // empty = last column
    bool csv_header = true;

    // BTS/BTSS grid + tournament ladder + explicit selectors, deduplicated.
    std::vector<std::string> expand_config_ids() const;
};

CampaignConfig load_campaign_config(const std::string& path);

// Seed for one campaign cell; stable across runs and platforms.
std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& dataset,
                        const std::string& config_id, std::size_t run_index);

// Resolves a dataset spec ("poly2@600", a registry name, or a csv path)
// and returns the normalized train/test pair for the configured fold.
std::pair<Dataset, Dataset> prepare_dataset(const CampaignConfig& cfg, const std::string& spec,
                                            const std::string& registry_path,
                                            const std::string& data_root);

// CLI entry points; return process exit codes (0 ok, 1 usage/config
// error, 2 data error).
int cmd_run(const std::string& config_path, const std::string& dataset_spec,
            std::uint64_t seed, const std::string& out_dir, const std::string& registry_path,
            const std::string& data_root);

int cmd_grid(const std::string& config_path, const std::string& out_dir, int jobs,
             const std::string& registry_path, const std::string& data_root);

int cmd_report(const std::string& campaign_dir, const std::string& baseline_id);

struct SelBenchRow {
    std::string selector;
    std::size_t n = 0;
    std::size_t cases = 0;
    std::size_t k = 0;
    std::size_t reps = 0;
    double median_seconds = 0.0;
};

// Times selection operators on a synthetic error matrix with uniform
// [0,1) entries; reports the median over `reps` timed calls.
std::vector<SelBenchRow> selbench(std::size_t n, std::size_t cases, std::size_t k,
                                  const std::vector<std::string>& selector_specs,
                                  std::size_t reps, std::uint64_t seed);

int cmd_selbench(std::size_t n, std::size_t cases, std::size_t k,
                 const std::vector<std::string>& selector_specs, std::size_t reps,
                 std::uint64_t seed, const std::string& out_path);

int cmd_validate_data(const std::string& registry_path, const std::string& data_root);

// Aggregates the run records found under <campaign>/<dataset>/. Missing
// cells produce a warning on stderr and are skipped.
std::vector<ConfigResult> collect_config_results(const std::string& campaign_dir,
                                                 const std::string& dataset);

}  // namespace sr
