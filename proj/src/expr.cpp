#include "pdiff/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pdiff/error.hpp"

namespace pdiff {

struct Expr::Node {
    Kind kind = Kind::Literal;
    double value = 0.0;
    int var = 0;
    Function fn = Function::Exp;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

constexpr std::array<std::pair<std::string_view, Expr::Function>, 6> kFunctions{{
    {"exp", Expr::Function::Exp},
    {"ln", Expr::Function::Ln},
    {"sin", Expr::Function::Sin},
    {"cos", Expr::Function::Cos},
    {"sqrt", Expr::Function::Sqrt},
    {"abs", Expr::Function::Abs},
}};

std::string_view function_name(Expr::Function fn) {
    for (const auto& [name, f] : kFunctions)
        if (f == fn) return name;
    return "?";
}

NodePtr make_literal(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Kind::Literal;
    n->value = v;
    return n;
}

NodePtr make_unary(Expr::Kind kind, NodePtr arg) {
    if (kind == Expr::Kind::Negate && arg->kind == Expr::Kind::Literal)
        return make_literal(-arg->value);
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->lhs = std::move(arg);
    return n;
}

NodePtr make_binary(Expr::Kind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        auto root = sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        auto lhs = product();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(Expr::Kind::Add, lhs, product());
            else if (accept('-'))
                lhs = make_binary(Expr::Kind::Sub, lhs, product());
            else
                return lhs;
        }
    }

    NodePtr product() {
        auto lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(Expr::Kind::Mul, lhs, unary());
            else if (accept('/'))
                lhs = make_binary(Expr::Kind::Div, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_unary(Expr::Kind::Negate, unary());
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (accept('^')) return make_binary(Expr::Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t count = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(v)) {
            pos_ = start;
            fail("malformed number");
        }
        return make_literal(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
            int index = 0;
            auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (ec == std::errc() && ptr == name.data() + name.size() && index >= 1) {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Kind::Variable;
                n->var = index;
                return n;
            }
        }
        for (const auto& [fname, fn] : kFunctions) {
            if (fname == name) {
                if (!accept('(')) fail("expected '(' after " + std::string(name));
                auto arg = sum();
                if (!accept(')')) fail("expected ')'");
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Kind::Call;
                n->fn = fn;
                n->lhs = std::move(arg);
                return n;
            }
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string point_string(std::span<const double> p) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ')';
    return os.str();
}

double eval_node(const Expr::Node& n, std::span<const double> x) {
    switch (n.kind) {
    case Expr::Kind::Literal:
        return n.value;
    case Expr::Kind::Variable:
        if (static_cast<std::size_t>(n.var) > x.size())
            throw NumericalError("variable x" + std::to_string(n.var) + " undefined at point " +
                                 point_string(x));
        return x[static_cast<std::size_t>(n.var - 1)];
    case Expr::Kind::Negate:
        return -eval_node(*n.lhs, x);
    case Expr::Kind::Call: {
        const double a = eval_node(*n.lhs, x);
        switch (n.fn) {
        case Expr::Function::Exp: return std::exp(a);
        case Expr::Function::Ln: return std::log(a);
        case Expr::Function::Sin: return std::sin(a);
        case Expr::Function::Cos: return std::cos(a);
        case Expr::Function::Sqrt: return std::sqrt(a);
        case Expr::Function::Abs: return std::abs(a);
        }
        return a;
    }
    case Expr::Kind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Expr::Kind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Expr::Kind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Expr::Kind::Div: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
    case Expr::Kind::Pow: {
        const double b = eval_node(*n.lhs, x);
        const double e = eval_node(*n.rhs, x);
        if (b < 0.0 && std::trunc(e) != e)
            throw NumericalError("negative base raised to non-integer power at point " +
                                 point_string(x));
        return std::pow(b, e);
    }
    }
    return 0.0;
}

int max_var(const Expr::Node& n) {
    int m = n.kind == Expr::Kind::Variable ? n.var : 0;
    if (n.lhs) m = std::max(m, max_var(*n.lhs));
    if (n.rhs) m = std::max(m, max_var(*n.rhs));
    return m;
}

std::string format_literal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print_node(const Expr::Node& n) {
    switch (n.kind) {
    case Expr::Kind::Literal:
        return n.value < 0.0 || std::signbit(n.value) ? "(" + format_literal(n.value) + ")"
                                                      : format_literal(n.value);
    case Expr::Kind::Variable: return "x" + std::to_string(n.var);
    case Expr::Kind::Negate: return "(-" + print_node(*n.lhs) + ")";
    case Expr::Kind::Call: return std::string(function_name(n.fn)) + "(" + print_node(*n.lhs) + ")";
    default: break;
    }
    char op = '+';
    switch (n.kind) {
    case Expr::Kind::Sub: op = '-'; break;
    case Expr::Kind::Mul: op = '*'; break;
    case Expr::Kind::Div: op = '/'; break;
    case Expr::Kind::Pow: op = '^'; break;
    default: break;
    }
    return "(" + print_node(*n.lhs) + op + print_node(*n.rhs) + ")";
}

bool equal_nodes(const Expr::Node& a, const Expr::Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Expr::Kind::Literal: return a.value == b.value;
    case Expr::Kind::Variable: return a.var == b.var;
    case Expr::Kind::Call:
        if (a.fn != b.fn) return false;
        break;
    default: break;
    }
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
    if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
    return (!a.lhs || equal_nodes(*a.lhs, *b.lhs)) && (!a.rhs || equal_nodes(*a.rhs, *b.rhs));
}

} // namespace

Expr::Expr() : Expr(make_literal(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
    if (max_var(*root_) == 0) {
        try {
            const double v = eval_node(*root_, {});
            if (std::isfinite(v)) constant_ = v;
        } catch (const NumericalError&) {
        }
    }
}

Expr Expr::constant(double value) {
    if (!std::isfinite(value)) throw InputError("non-finite literal");
    return Expr(make_literal(value));
}

Expr Expr::variable(int index) {
    if (index < 1) throw InputError("variable index must be >= 1");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var = index;
    return Expr(std::move(n));
}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse()); }

double Expr::eval(std::span<const double> point) const {
    if (constant_) return *constant_;
    const double v = eval_node(*root_, point);
    if (!std::isfinite(v))
        throw NumericalError("expression " + print() + " is not finite at point " +
                             point_string(point));
    return v;
}

int Expr::max_variable() const noexcept { return max_var(*root_); }

std::string Expr::print() const { return print_node(*root_); }

Expr::Kind Expr::kind() const noexcept { return root_->kind; }

bool Expr::structurally_equal(const Expr& other) const { return equal_nodes(*root_, *other.root_); }

Expr operator+(const Expr& a, const Expr& b) {
    if (a.constant_ && b.constant_) return Expr::constant(*a.constant_ + *b.constant_);
    return Expr(make_binary(Expr::Kind::Add, a.root_, b.root_));
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.constant_ && b.constant_) return Expr::constant(*a.constant_ * *b.constant_);
    return Expr(make_binary(Expr::Kind::Mul, a.root_, b.root_));
}

Expr operator-(const Expr& a) { return Expr(make_unary(Expr::Kind::Negate, a.root_)); }

} // namespace pdiff
