#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "pdiff/error.hpp"
#include "pdiff/expr.hpp"

using pdiff::Expr;

namespace {

double eval(const std::string& text, std::initializer_list<double> point) {
    const std::vector<double> p(point);
    return Expr::parse(text).eval(std::span<const double>(p));
}

std::size_t syntax_offset(const std::string& text) {
    try {
        Expr::parse(text);
    } catch (const pdiff::SyntaxError& e) {
        return e.offset();
    }
    FAIL("no syntax error for " << text);
    return 0;
}

// Random well-formed expression text over x1, x2.
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    std::uniform_real_distribution<double> lit(0.0, 5.0);
    switch (pick(rng)) {
    case 0: return std::to_string(lit(rng));
    case 1: return "x1";
    case 2: return "x2";
    case 3: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
    case 4: return random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 6: return "-" + random_expr(rng, depth - 1);
    case 7: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 8: return "(" + random_expr(rng, depth - 1) + ")^2";
    default: return "exp(" + random_expr(rng, depth - 1) + "/7)";
    }
}

} // namespace

TEST_CASE("parse builds the expected trees") {
    CHECK(Expr::parse("x1^2+1").print() == "((x1^2)+1)");
    CHECK(Expr::parse("x1^2+1").kind() == Expr::Kind::Add);
    CHECK(Expr::parse("2*x1+x2").print() == "((2*x1)+x2)");
    CHECK(Expr::parse("  2 *  x1 ").print() == "(2*x1)");
    CHECK(Expr::parse("-x1^2").print() == "(-(x1^2))");
    CHECK(Expr::parse("x1^2^3").print() == "(x1^(2^3))");
    CHECK(Expr::parse("sqrt(abs(x3))").max_variable() == 3);
}

TEST_CASE("syntax errors carry byte offsets") {
    CHECK(syntax_offset("x1+*2") == 3);
    CHECK(syntax_offset("2x1") == 1);
    CHECK(syntax_offset("(x1+1") == 5);
    CHECK(syntax_offset("") == 0);
    CHECK(syntax_offset("x1 + foo(2)") == 5);
    CHECK(syntax_offset("x0") == 0);
    CHECK(syntax_offset("exp 1") == 4);
}

TEST_CASE("eval follows real semantics") {
    CHECK(eval("x1^2+1", {2.0}) == 5.0);
    CHECK(eval("exp(0)", {}) == 1.0);
    CHECK(eval("exp(0)", {3.0, 4.0}) == 1.0);
    CHECK(eval("x1^2^3", {2.0}) == 256.0);
    CHECK(eval("-x1^2", {3.0}) == -9.0);
    CHECK(eval("(-2)^3", {}) == -8.0);
    CHECK(eval("2^-1", {}) == 0.5);
    CHECK(eval("ln(x1) + sqrt(x2) - abs(-3)", {std::exp(1.0), 4.0}) == doctest::Approx(0.0));
    CHECK(eval("sin(x1)*cos(x1)", {0.3}) == doctest::Approx(std::sin(0.3) * std::cos(0.3)));
    CHECK(eval("1.5e2 + .5", {}) == 150.5);
}

TEST_CASE("evaluation failures") {
    CHECK_THROWS_AS(eval("1/x1", {0.0}), pdiff::NumericalError);
    CHECK_THROWS_AS(eval("ln(x1)", {0.0}), pdiff::NumericalError);
    CHECK_THROWS_AS(eval("ln(x1)", {-1.0}), pdiff::NumericalError);
    CHECK_THROWS_AS(eval("(-2)^0.5", {}), pdiff::NumericalError);
    CHECK_THROWS_AS(eval("x1^0.5", {-4.0}), pdiff::NumericalError);
    CHECK_THROWS_AS(eval("x2", {1.0}), pdiff::NumericalError);
    CHECK_THROWS_AS(eval("exp(x1)", {1000.0}), pdiff::NumericalError);
}

TEST_CASE("variable-free expressions are constants") {
    CHECK(Expr::parse("3*2").constant_value() == 6.0);
    CHECK(Expr::parse("7").constant_value() == 7.0);
    CHECK(Expr::parse("7").kind() == Expr::Kind::Literal);
    CHECK(Expr::parse("-7").kind() == Expr::Kind::Literal);
    CHECK_FALSE(Expr::parse("x1*0").is_constant());
    CHECK_FALSE(Expr::parse("1/0").is_constant());
}

TEST_CASE("print then parse is stable") {
    std::mt19937_64 rng(20240917);
    const std::vector<double> point{0.37, -1.25};
    for (int i = 0; i < 500; ++i) {
        const std::string text = random_expr(rng, 4);
        const Expr e = Expr::parse(text);
        const Expr again = Expr::parse(e.print());
        INFO(text);
        CHECK(again.structurally_equal(e));
        CHECK(Expr::parse(again.print()).print() == e.print());
        auto value = [&](const Expr& x) -> std::optional<double> {
            try {
                return x.eval(std::span<const double>(point));
            } catch (const pdiff::NumericalError&) {
                return std::nullopt;
            }
        };
        CHECK(value(again) == value(e));
    }
}

TEST_CASE("negative literals keep their grouping in print") {
    const Expr e = Expr::parse("(-2)^2");
    CHECK(e.eval(std::span<const double>()) == 4.0);
    CHECK(Expr::parse(e.print()).eval(std::span<const double>()) == 4.0);
    const Expr c = Expr::constant(-2.5);
    CHECK(Expr::parse(c.print()).structurally_equal(c));
}
