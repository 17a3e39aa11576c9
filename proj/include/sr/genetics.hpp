#pragma once

#include <utility>
#include <vector>

#include "sr/exprtree.hpp"
#include "sr/rng.hpp"

namespace sr {

struct VariationConfig {
    double crossover_rate = 0.90;
    double mutation_rate = 0.10;
    int max_initial_depth = 3;
    int max_depth = 7;
    int elite_count = 1;
};

// Random terminal: feature reference or ephemeral constant in [-1, 1],
// each with probability 1/2. One draw for the kind, one for the payload.
ExprTree random_terminal(int n_features, Rng& rng);

// "Full" tree: every leaf sits exactly at the target depth.
ExprTree grow_full(int target_depth, int n_features, Rng& rng);

// "Grow" tree: below the depth budget each node is a terminal with
// probability 1/2, so leaves may appear early.
ExprTree grow_random(int depth_budget, int n_features, Rng& rng);

// Ramped half-and-half over depths {1..max_initial_depth}: consecutive
// pairs share a depth level, the first of each pair built full, the
// second grown.
std::vector<ExprTree> init_population(std::size_t size, int n_features,
                                      const VariationConfig& config, Rng& rng);

// Swaps uniformly chosen subtrees between the parents. An offspring whose
// depth exceeds max_depth is replaced by a copy of its own parent.
std::pair<ExprTree, ExprTree> one_point_crossover(const ExprTree& a, const ExprTree& b,
                                                  const VariationConfig& config, Rng& rng);

// Replaces a uniformly chosen subtree with a fresh grown one whose depth
// budget is max_depth minus the insertion depth.
ExprTree uniform_subtree_mutation(const ExprTree& a, int n_features,
                                  const VariationConfig& config, Rng& rng);

// Pairwise offspring dispatch: with probability crossover_rate the pair is
// crossed over; otherwise each member is mutated with the renormalized
// probability mutation_rate / (1 - crossover_rate), else copied verbatim.
// A trailing unpaired parent takes the same event draw with crossover
// degrading to a verbatim copy.
std::vector<ExprTree> make_offspring(const std::vector<ExprTree>& parents, int n_features,
                                     const VariationConfig& config, Rng& rng);

}  // namespace sr
