#include "sr/genetics.hpp"

#include <stdexcept>

namespace sr {

namespace {

OpKind random_op(Rng& rng) { return static_cast<OpKind>(rng.uniform_index(kOpCount)); }

ExprTree op_with_children(OpKind op, int child_depth, int n_features, Rng& rng, bool full) {
    std::vector<ExprNode> children;
    children.reserve(static_cast<std::size_t>(op_arity(op)));
    for (int i = 0; i < op_arity(op); ++i)
        children.push_back(full ? grow_full(child_depth, n_features, rng)
                                : grow_random(child_depth, n_features, rng));
    return ExprNode::make_op(op, std::move(children));
}

}  // namespace

ExprTree random_terminal(int n_features, Rng& rng) {
    if (rng.uniform_index(2) == 0)
        return ExprNode::variable(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n_features))));
    return ExprNode::constant(rng.uniform(-1.0, 1.0));
}

ExprTree grow_full(int target_depth, int n_features, Rng& rng) {
    if (target_depth <= 0) return random_terminal(n_features, rng);
    return op_with_children(random_op(rng), target_depth - 1, n_features, rng, /*full=*/true);
}

ExprTree grow_random(int depth_budget, int n_features, Rng& rng) {
    if (depth_budget <= 0) return random_terminal(n_features, rng);
    if (rng.uniform_index(2) == 0) return random_terminal(n_features, rng);
    return op_with_children(random_op(rng), depth_budget - 1, n_features, rng, /*full=*/false);
}

std::vector<ExprTree> init_population(std::size_t size, int n_features,
                                      const VariationConfig& config, Rng& rng) {
    if (size == 0) throw std::invalid_argument("init_population: size must be > 0");
    if (n_features < 1) throw std::invalid_argument("init_population: need at least one feature");
    const std::size_t levels = static_cast<std::size_t>(config.max_initial_depth);
    std::vector<ExprTree> pop;
    pop.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        int depth = static_cast<int>((i / 2) % levels) + 1;
        bool full = (i % 2) == 0;
        pop.push_back(full ? grow_full(depth, n_features, rng)
                           : grow_random(depth, n_features, rng));
    }
    return pop;
}

std::pair<ExprTree, ExprTree> one_point_crossover(const ExprTree& a, const ExprTree& b,
                                                  const VariationConfig& config, Rng& rng) {
    const std::size_t ia = rng.uniform_index(tree_node_count(a));
    const std::size_t ib = rng.uniform_index(tree_node_count(b));

    ExprTree child_a = a;
    ExprTree child_b = b;
    const ExprNode sub_a = *node_at(a, ia);
    const ExprNode sub_b = *node_at(b, ib);
    *node_at(child_a, ia) = sub_b;
    *node_at(child_b, ib) = sub_a;

    if (tree_depth(child_a) > config.max_depth) child_a = a;
    if (tree_depth(child_b) > config.max_depth) child_b = b;
    return {std::move(child_a), std::move(child_b)};
}

ExprTree uniform_subtree_mutation(const ExprTree& a, int n_features,
                                  const VariationConfig& config, Rng& rng) {
    const std::size_t idx = rng.uniform_index(tree_node_count(a));
    const int budget = config.max_depth - node_depth_at(a, idx);
    ExprTree child = a;
    *node_at(child, idx) = grow_random(budget, n_features, rng);
    return child;
}

std::vector<ExprTree> make_offspring(const std::vector<ExprTree>& parents, int n_features,
                                     const VariationConfig& config, Rng& rng) {
    const double cx = config.crossover_rate;
    const double renorm_mut = cx < 1.0 ? config.mutation_rate / (1.0 - cx) : 0.0;

    std::vector<ExprTree> offspring;
    offspring.reserve(parents.size());
    std::size_t i = 0;
    for (; i + 1 < parents.size(); i += 2) {
        if (rng.uniform01() < cx) {
            auto [c1, c2] = one_point_crossover(parents[i], parents[i + 1], config, rng);
            offspring.push_back(std::move(c1));
            offspring.push_back(std::move(c2));
        } else if (rng.uniform01() < renorm_mut) {
            offspring.push_back(uniform_subtree_mutation(parents[i], n_features, config, rng));
            offspring.push_back(uniform_subtree_mutation(parents[i + 1], n_features, config, rng));
        } else {
            offspring.push_back(parents[i]);
            offspring.push_back(parents[i + 1]);
        }
    }
    if (i < parents.size()) {
        // Unpaired trailing parent: crossover has no partner, so that
        // branch degrades to a copy.
        if (rng.uniform01() < cx) {
            offspring.push_back(parents[i]);
        } else if (rng.uniform01() < renorm_mut) {
            offspring.push_back(uniform_subtree_mutation(parents[i], n_features, config, rng));
        } else {
            offspring.push_back(parents[i]);
        }
    }
    return offspring;
}

}  // namespace sr
