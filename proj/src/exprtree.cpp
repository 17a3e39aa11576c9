#include "sr/exprtree.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace sr {

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::Div: return "div";
        case OpKind::Sin: return "sin";
        case OpKind::Cos: return "cos";
        case OpKind::Exp: return "exp";
        case OpKind::Log: return "log";
    }
    return "?";
}

int tree_depth(const ExprTree& t) {
    if (t.kind != ExprNode::Kind::Op) return 0;
    int d = 0;
    for (const auto& c : t.children) d = std::max(d, tree_depth(c));
    return d + 1;
}

std::size_t tree_node_count(const ExprTree& t) {
    std::size_t n = 1;
    for (const auto& c : t.children) n += tree_node_count(c);
    return n;
}

namespace {

ExprNode* node_at_impl(ExprNode& n, std::size_t& remaining) {
    if (remaining == 0) return &n;
    --remaining;
    for (auto& c : n.children) {
        if (ExprNode* hit = node_at_impl(c, remaining)) return hit;
    }
    return nullptr;
}

bool node_depth_impl(const ExprNode& n, std::size_t& remaining, int depth, int& out) {
    if (remaining == 0) {
        out = depth;
        return true;
    }
    --remaining;
    for (const auto& c : n.children) {
        if (node_depth_impl(c, remaining, depth + 1, out)) return true;
    }
    return false;
}

}  // namespace

ExprNode* node_at(ExprTree& t, std::size_t preorder_index) {
    std::size_t rem = preorder_index;
    return node_at_impl(t, rem);
}

const ExprNode* node_at(const ExprTree& t, std::size_t preorder_index) {
    std::size_t rem = preorder_index;
    return node_at_impl(const_cast<ExprTree&>(t), rem);
}

int node_depth_at(const ExprTree& t, std::size_t preorder_index) {
    std::size_t rem = preorder_index;
    int out = -1;
    node_depth_impl(t, rem, 0, out);
    return out;
}

int max_var_index(const ExprTree& t) {
    int m = t.kind == ExprNode::Kind::Variable ? t.var_index : -1;
    for (const auto& c : t.children) m = std::max(m, max_var_index(c));
    return m;
}

std::string to_string(const ExprTree& t) {
    switch (t.kind) {
        case ExprNode::Kind::Variable:
            return "x" + std::to_string(t.var_index);
        case ExprNode::Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", t.value);
            return buf;
        }
        case ExprNode::Kind::Op: {
            std::string s = "(";
            s += op_name(t.op);
            for (const auto& c : t.children) {
                s += ' ';
                s += to_string(c);
            }
            s += ')';
            return s;
        }
    }
    return "?";
}

double evaluate_case(const ExprTree& tree, std::span<const double> row) {
    switch (tree.kind) {
        case ExprNode::Kind::Variable:
            return row[static_cast<std::size_t>(tree.var_index)];
        case ExprNode::Kind::Constant:
            return tree.value;
        case ExprNode::Kind::Op: {
            double a = evaluate_case(tree.children[0], row);
            double b = tree.children.size() > 1 ? evaluate_case(tree.children[1], row) : 0.0;
            return apply_protected(tree.op, a, b);
        }
    }
    return 1.0;
}

namespace {

// Node-major walk: each node produces its value for every case at once,
// amortizing tree dispatch across the batch. Per case the operation
// sequence is the same as evaluate_case, so results are bit-identical.
void eval_batch(const ExprNode& n, const std::vector<std::vector<double>>& columns,
                std::size_t n_cases, std::vector<double>& out) {
    switch (n.kind) {
        case ExprNode::Kind::Variable: {
            const auto& col = columns[static_cast<std::size_t>(n.var_index)];
            out.assign(col.begin(), col.end());
            return;
        }
        case ExprNode::Kind::Constant:
            out.assign(n_cases, n.value);
            return;
        case ExprNode::Kind::Op: {
            eval_batch(n.children[0], columns, n_cases, out);
            if (n.children.size() > 1) {
                std::vector<double> rhs;
                eval_batch(n.children[1], columns, n_cases, rhs);
                for (std::size_t i = 0; i < n_cases; ++i)
                    out[i] = apply_protected(n.op, out[i], rhs[i]);
            } else {
                for (std::size_t i = 0; i < n_cases; ++i)
                    out[i] = apply_protected(n.op, out[i]);
            }
            return;
        }
    }
}

}  // namespace

BatchEvaluator::BatchEvaluator(const std::vector<std::vector<double>>& features,
                               std::vector<double> targets)
    : targets_(std::move(targets)), n_cases_(features.size()) {
    if (targets_.size() != n_cases_)
        throw std::invalid_argument("evaluate: |targets| != case count");
    const std::size_t n_features = n_cases_ == 0 ? 0 : features[0].size();
    // Column-major staging so variable leaves read contiguous memory.
    columns_.assign(n_features, std::vector<double>(n_cases_));
    for (std::size_t i = 0; i < n_cases_; ++i)
        for (std::size_t d = 0; d < n_features; ++d) columns_[d][i] = features[i][d];
}

EvalResult BatchEvaluator::evaluate(const ExprTree& tree) const {
    if (max_var_index(tree) >= static_cast<int>(columns_.size()))
        throw std::invalid_argument("evaluate: tree references feature index >= feature count");
    EvalResult r;
    eval_batch(tree, columns_, n_cases_, r.predictions);
    r.case_errors.resize(n_cases_);
    double sum = 0.0;
    for (std::size_t i = 0; i < n_cases_; ++i) {
        r.case_errors[i] = std::abs(r.predictions[i] - targets_[i]);
        sum += r.case_errors[i];
    }
    r.mae = n_cases_ == 0 ? 0.0 : sum / static_cast<double>(n_cases_);
    return r;
}

EvalResult evaluate(const ExprTree& tree, const std::vector<std::vector<double>>& features,
                    const std::vector<double>& targets) {
    return BatchEvaluator(features, targets).evaluate(tree);
}

}  // namespace sr
