#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace pdiff {

/// Coefficient expressions gamma(x1, ..., xn).
///
/// Grammar, lowest to highest precedence:
///
///     sum     := product (('+' | '-') product)*
///     product := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          (right associative)
///     primary := number | 'x'k | name '(' sum ')' | '(' sum ')'
///
/// Functions: exp, ln, sin, cos, sqrt, abs. Variables are 1-based.
/// Implicit multiplication is not accepted.
class Expr {
public:
    enum class Kind { Literal, Variable, Negate, Call, Add, Sub, Mul, Div, Pow };
    enum class Function { Exp, Ln, Sin, Cos, Sqrt, Abs };

    struct Node;

    /// Literal zero.
    Expr();

    static Expr constant(double value);
    static Expr variable(int index);

    /// Throws SyntaxError (unknown identifiers included) with a byte offset.
    static Expr parse(std::string_view text);

    /// Throws NumericalError when the result is not finite, when a negative
    /// base meets a non-integer exponent, or when a variable index exceeds
    /// the point's dimension.
    double eval(std::span<const double> point) const;
    double eval(const Eigen::VectorXd& point) const {
        return eval(std::span<const double>(point.data(), static_cast<std::size_t>(point.size())));
    }

    /// Value of a variable-free expression, computed once at construction.
    std::optional<double> constant_value() const noexcept { return constant_; }
    bool is_constant() const noexcept { return constant_.has_value(); }

    /// Highest variable index referenced, 0 if none.
    int max_variable() const noexcept;

    /// Canonical form: binary operations fully parenthesized, literals at
    /// 17 significant digits. parse(print(e)) is structurally equal to e.
    std::string print() const;

    Kind kind() const noexcept;
    bool structurally_equal(const Expr& other) const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

private:
    explicit Expr(std::shared_ptr<const Node> root);

    std::shared_ptr<const Node> root_;
    std::optional<double> constant_;
};

} // namespace pdiff
