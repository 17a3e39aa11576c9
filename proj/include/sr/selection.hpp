#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sr/rng.hpp"

namespace sr {

// Frozen per-individual, per-case absolute errors: the only thing a
// selection operator is allowed to read. Row MAEs are cached on
// construction. N individuals by T cases, row-major.
class ErrorMatrix {
public:
    ErrorMatrix(std::size_t individuals, std::size_t cases);

    static ErrorMatrix from_rows(const std::vector<std::vector<double>>& rows);

    void set_row(std::size_t i, std::span<const double> errors);

    double at(std::size_t i, std::size_t t) const { return e_[i * t_ + t]; }
    std::span<const double> row(std::size_t i) const { return {e_.data() + i * t_, t_}; }
    double row_mae(std::size_t i) const { return row_mae_[i]; }
    const std::vector<double>& row_maes() const { return row_mae_; }

    std::size_t individuals() const { return n_; }
    std::size_t cases() const { return t_; }

private:
    std::size_t n_;
    std::size_t t_;
    std::vector<double> e_;
    std::vector<double> row_mae_;
};

struct BatchTournamentConfig {
    std::size_t batch_size = 8;
    std::size_t tourn_size = 16;
    bool shuffle = false;  // false = difficulty-ordered batches, true = shuffled
    std::size_t k = 1;
};

// An ordered partition of case indices into consecutive chunks. All
// batches have batch_size entries except possibly the last.
struct BatchPlan {
    std::vector<std::size_t> case_order;
    struct Range {
        std::size_t begin;
        std::size_t end;  // half-open into case_order
    };
    std::vector<Range> batches;
};

// Per-case epsilon thresholds for automatic epsilon-lexicase: the median
// absolute deviation of the population's errors on each case.
struct EpsilonLexicaseState {
    std::vector<double> epsilon_per_case;
};

// Canonical tournament on row MAE. Per winner: tourn_size candidate
// indices drawn uniformly with replacement; ties break toward the
// earliest draw.
std::vector<std::size_t> select_tournament(const ErrorMatrix& em, std::size_t tourn_size,
                                           std::size_t k, Rng& rng);

// Lexicase: each parent filters the whole population through a fresh
// random case order, keeping per-case best performers; a final tie is
// resolved uniformly.
std::vector<std::size_t> select_lexicase(const ErrorMatrix& em, std::size_t k, Rng& rng);

EpsilonLexicaseState compute_auto_epsilon(const ErrorMatrix& em);

// Lexicase with per-case slack: survivors are those within
// epsilon_per_case[t] of the best survivor error on case t.
std::vector<std::size_t> select_epsilon_lexicase(const ErrorMatrix& em,
                                                 const EpsilonLexicaseState& eps,
                                                 std::size_t k, Rng& rng);

// One filtering pass over an explicit case order; exposed so the walk is
// testable without going through the internal shuffle. eps may be empty
// (plain lexicase) or hold one threshold per case. Returns the surviving
// set after the walk stops.
std::vector<std::size_t> lexicase_walk(const ErrorMatrix& em,
                                       std::span<const std::size_t> case_order,
                                       std::span<const double> eps);

// Case indices sorted by the error of the best-MAE individual, hardest
// first. Ties: best individual by lowest index, cases by lower index.
std::vector<std::size_t> order_cases_by_difficulty(const ErrorMatrix& em);

BatchPlan partition_batches(std::vector<std::size_t> case_order, std::size_t batch_size);

// Batch tournament selection. Cases are ordered (by difficulty, or
// shuffled once when config.shuffle) and chunked; batches are consumed as
// a queue, one tournament on batch-mean error per batch, restarting from
// the first batch of the same plan until k parents are selected.
std::vector<std::size_t> select_batch_tournament(const ErrorMatrix& em,
                                                 const BatchTournamentConfig& config, Rng& rng);

}  // namespace sr
