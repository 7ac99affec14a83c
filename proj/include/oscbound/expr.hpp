#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oscbound/jet.hpp"

namespace oscbound {

enum class ExprOp : std::uint8_t {
    Literal,
    Var,   // x1, x2, x3 (x is an alias for x1)
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
};

struct ExprNode {
    ExprOp op;
    int lhs = -1;  // child index; unary ops use lhs only
    int rhs = -1;
    double value = 0.0;  // Literal payload
    int var = 0;         // Var payload, 0-based
};

// Immutable parsed expression in up to three variables. Nodes live in a flat
// arena in evaluation order (children precede parents), so evaluation is a
// single forward pass without recursion.
class Expr {
public:
    static constexpr int kMaxVars = 3;

    // Parses with standard precedence: ^ binds tighter than unary minus,
    // which binds tighter than * and /, which bind tighter than + and -.
    // ^ is right-associative. See docs/grammar.md.
    static Expr parse(std::string_view text);

    // Canonical text form; parsing it again gives a structurally
    // identical tree.
    std::string to_string() const;

    bool same_structure(const Expr& other) const;

    // Number of coordinates required to evaluate (highest variable index + 1).
    int arity() const { return arity_; }

    const std::vector<ExprNode>& nodes() const { return nodes_; }

    double value_at(std::span<const double> point) const;

    // Jet along the variable `active` (0-based), other coordinates frozen.
    // coeff(m) * m! is the m-th derivative. Throws DomainError on domain
    // violations and EvalError if order > Jet::kMaxOrder or the point is
    // missing a coordinate.
    Jet jet_at(std::span<const double> point, int active, int order) const;

    // Convenience for one-variable expressions.
    double operator()(double x) const { return value_at(std::span(&x, 1)); }

private:
    friend class ExprParser;
    std::vector<ExprNode> nodes_;
    int root_ = -1;
    int arity_ = 0;
};

// Callable view of one variable's dependence: returns the jet of order
// `order` at x. This is the common currency between the expression layer
// and the numerics below it.
using JetFn = std::function<Jet(double x, int order)>;

// JetFn for an expression with all coordinates except `active` frozen to
// the values in `point`.
JetFn section(const Expr& e, std::vector<double> point, int active);

// JetFn of a one-variable expression.
inline JetFn as_jetfn(const Expr& e) { return section(e, {0.0}, 0); }

// Value-only callable for a one-variable expression.
std::function<double(double)> as_fn(const Expr& e);

// m-th derivative shortcut: jet coefficient times m!.
inline double derivative_at(const JetFn& f, double x, int m) {
    return f(x, m).derivative(m);
}

}  // namespace oscbound
