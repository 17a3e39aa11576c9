#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sr/dataset.hpp"
#include "sr/genetics.hpp"
#include "sr/selection.hpp"

namespace sr {

// Selector choices, named after the run nomenclature they print as:
// Tourn/ts, Lex, Ae-Lex, BTS/bs/ts, BTSS/bs/ts.
struct TournamentSelector {
    std::size_t tourn_size = 8;
};
struct LexicaseSelector {};
struct AutoEpsilonLexicaseSelector {};
struct BatchTournamentSelector {
    std::size_t batch_size = 8;
    std::size_t tourn_size = 16;
    bool shuffle = false;
};
using SelectorSpec = std::variant<TournamentSelector, LexicaseSelector,
                                  AutoEpsilonLexicaseSelector, BatchTournamentSelector>;

std::string selector_id(const SelectorSpec& spec);
// Parses "Tourn/8", "Lex", "Ae-Lex", "BTS/8/16", "BTSS/4/64"
// (case-insensitive; "lexicase" and "aelex" accepted as aliases).
SelectorSpec parse_selector(const std::string& id);

struct EngineConfig {
    std::size_t population_size = 1000;
    std::size_t generations = 1000;
    SelectorSpec selector = AutoEpsilonLexicaseSelector{};
    VariationConfig variation;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GenerationRecord {
    std::size_t gen = 0;
    double best_train_mae = 0.0;
    double best_test_mae = 0.0;
    double diversity = 0.0;
    double selection_wall_time_s = 0.0;
    double total_wall_time_s = 0.0;
};

struct RunRecord {
    std::vector<GenerationRecord> per_generation;  // generations + 1 rows
    std::string final_best;                        // serialized tree
    std::string config_id;
    double total_seconds = 0.0;

    std::string to_json() const;
    // Header: gen,best_train_mae,best_test_mae,diversity,
    // selection_wall_time_s,total_wall_time_s
    std::string to_csv() const;
    static RunRecord from_json(const std::string& text);
};

// Fraction of distinct row-MAE values in the population; distinctness is
// judged after rounding to 12 significant digits.
double diversity(const ErrorMatrix& em);

// Generational loop: evaluate on train, record metrics (test MAE for the
// train-best individual only), select population_size - elite_count
// parents, vary, and reassemble as elites + offspring. Metrics for
// generation 0 are recorded before any selection. Deterministic per seed;
// test data never reaches selection or variation.
RunRecord run(const EngineConfig& config, const Dataset& train, const Dataset& test);

}  // namespace sr
