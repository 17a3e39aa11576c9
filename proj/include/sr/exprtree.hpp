#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sr {

// Primitive operator set: four binary arithmetic ops and four unary
// transcendentals. All are protected: any application whose mathematical
// result is undefined or non-finite evaluates to 1.0 instead, so every
// tree is total over finite inputs.
enum class OpKind { Add, Sub, Mul, Div, Sin, Cos, Exp, Log };

constexpr int op_arity(OpKind k) {
    switch (k) {
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul:
        case OpKind::Div:
            return 2;
        default:
            return 1;
    }
}

const char* op_name(OpKind k);
constexpr int kOpCount = 8;

// Protected application of one operator to already-finite arguments.
inline double apply_protected(OpKind op, double a, double b = 0.0) {
    double r;
    switch (op) {
        case OpKind::Add: r = a + b; break;
        case OpKind::Sub: r = a - b; break;
        case OpKind::Mul: r = a * b; break;
        case OpKind::Div: r = a / b; break;
        case OpKind::Sin: r = std::sin(a); break;
        case OpKind::Cos: r = std::cos(a); break;
        case OpKind::Exp: r = std::exp(a); break;
        case OpKind::Log: r = std::log(a); break;
        default: r = 1.0; break;
    }
    return std::isfinite(r) ? r : 1.0;
}

// One tree node: a feature reference, an ephemeral random constant, or an
// operator with `op_arity` children. Value semantics throughout; a tree is
// just its root node.
struct ExprNode {
    enum class Kind { Variable, Constant, Op };

    Kind kind = Kind::Constant;
    int var_index = 0;     // Kind::Variable
    double value = 0.0;    // Kind::Constant
    OpKind op = OpKind::Add;
    std::vector<ExprNode> children;

    static ExprNode variable(int index) {
        ExprNode n;
        n.kind = Kind::Variable;
        n.var_index = index;
        return n;
    }
    static ExprNode constant(double v) {
        ExprNode n;
        n.kind = Kind::Constant;
        n.value = v;
        return n;
    }
    static ExprNode make_op(OpKind op, std::vector<ExprNode> children) {
        ExprNode n;
        n.kind = Kind::Op;
        n.op = op;
        n.children = std::move(children);
        return n;
    }
};

using ExprTree = ExprNode;

// Depth of a single node is 0.
int tree_depth(const ExprTree& t);
std::size_t tree_node_count(const ExprTree& t);

// Preorder node access (index 0 = root). Used for uniform node selection.
ExprNode* node_at(ExprTree& t, std::size_t preorder_index);
const ExprNode* node_at(const ExprTree& t, std::size_t preorder_index);
// Depth at which the given preorder index sits below the root.
int node_depth_at(const ExprTree& t, std::size_t preorder_index);

// Largest feature index referenced, or -1 for a tree without variables.
int max_var_index(const ExprTree& t);

// S-expression form, constants rendered with round-trip precision.
std::string to_string(const ExprTree& t);

struct EvalResult {
    std::vector<double> predictions;
    std::vector<double> case_errors;  // |prediction - target| per case
    double mae = 0.0;
};

// Evaluates the tree on every row of a case-major feature matrix.
// Predictions and errors are always finite (protected operators); a
// variable index out of range is a configuration error and throws.
EvalResult evaluate(const ExprTree& tree, const std::vector<std::vector<double>>& features,
                    const std::vector<double>& targets);

// Single-case evaluation by direct recursive walk. The batch evaluator
// produces bit-identical predictions; this is the plain reference path,
// also used on its own where only one row is needed.
double evaluate_case(const ExprTree& tree, std::span<const double> row);

// Holds one dataset staged column-major so many trees can be scored
// against it without restaging. evaluate() below is a convenience wrapper
// around a throwaway instance.
class BatchEvaluator {
public:
    BatchEvaluator(const std::vector<std::vector<double>>& features,
                   std::vector<double> targets);

    EvalResult evaluate(const ExprTree& tree) const;

    std::size_t case_count() const { return n_cases_; }
    std::size_t feature_count() const { return columns_.size(); }

private:
    std::vector<std::vector<double>> columns_;
    std::vector<double> targets_;
    std::size_t n_cases_;
};

}  // namespace sr
