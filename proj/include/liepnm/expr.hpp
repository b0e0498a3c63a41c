#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace liepnm::expr {

enum class UnaryOp { Neg, Exp, Log, Sqrt, Sin, Cos };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;

/// Immutable univariate expression in the variable `r`.
///
/// Copies share the underlying tree, so an Expression is cheap to pass by value
/// and safe to evaluate concurrently.
class Expression {
public:
    static Expression constant(double value);
    static Expression variable();
    static Expression unary(UnaryOp op, Expression operand);
    static Expression binary(BinaryOp op, Expression lhs, Expression rhs);

    /// Evaluate at `r`. Throws DomainError instead of returning NaN/inf.
    double operator()(double r) const;

    /// Value and first derivative with respect to `r` (forward-mode).
    struct Derivative {
        double value;
        double slope;
    };
    Derivative differentiate(double r) const;

    /// Fully parenthesised text that parses back to an equivalent tree.
    std::string to_string() const;

    const Node& root() const { return *root_; }

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

/// Parse an arithmetic expression over `r`.
///
/// Grammar (highest precedence first): `^` (right-assoc), unary `-`, `* /`, `+ -`.
/// Functions: exp, log, sqrt, sin, cos. Throws ParseError.
Expression parse(std::string_view text);

}  // namespace liepnm::expr
