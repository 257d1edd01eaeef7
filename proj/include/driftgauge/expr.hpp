#ifndef DRIFTGAUGE_EXPR_HPP
#define DRIFTGAUGE_EXPR_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftgauge/errors.hpp"

namespace driftgauge::expr {

// AST over real-valued functions of a single variable x.
// Grammar: constants, x, + - * /, ^ with constant exponent, exp, log,
// sqrt, abs, unary minus.  pi and e are predefined constants.
enum class Kind {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Pow, // exponent is a constant, stored in Node::value
    Neg,
    Exp,
    Log,
    Sqrt,
    Abs,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Kind kind;
    double value = 0.0; // Constant value, or exponent for Pow
    NodePtr a, b;       // children; unary nodes use a only
};

class Expression {
public:
    Expression() = default;

    static Expression constant(double v);
    static Expression variable();
    static Expression from_node(NodePtr n) { return Expression(std::move(n)); }

    bool valid() const { return root_ != nullptr; }
    const NodePtr& root() const { return root_; }

    // IEEE-double evaluation; throws DomainError instead of returning NaN.
    double operator()(double x) const;

    // Symbolic derivative.  abs differentiates to u/abs(u), which signals a
    // domain error when evaluated at a zero of u.
    Expression derivative() const;

    std::string str() const;

    bool same_structure(const Expression& other) const;

    // Constant-folds the whole tree; returns the value if the expression
    // does not depend on x and evaluates cleanly.
    std::optional<double> constant_value() const;

private:
    explicit Expression(NodePtr r) : root_(std::move(r)) {}
    NodePtr root_;
};

Expression parse(std::string_view text);

// Simplifying constructors used when building expressions in code.
Expression add(const Expression& a, const Expression& b);
Expression sub(const Expression& a, const Expression& b);
Expression mul(const Expression& a, const Expression& b);
Expression div(const Expression& a, const Expression& b);
Expression pow(const Expression& base, double exponent);
Expression neg(const Expression& a);
Expression exp(const Expression& a);
Expression log(const Expression& a);
Expression sqrt(const Expression& a);
Expression abs(const Expression& a);

// Decomposition of an expression as sum_i coeff_i * x^exponent_i, when the
// tree is built from powers of x with constant coefficients.  Returns
// nullopt for anything outside that class (exp/log/abs of non-constants).
struct PowerTerm {
    double coeff;
    double exponent;
};
std::optional<std::vector<PowerTerm>> as_power_sum(const Expression& e);

} // namespace driftgauge::expr

#endif
