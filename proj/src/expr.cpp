#include "liepnm/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "liepnm/error.hpp"

namespace liepnm::expr {

struct Node {
    struct Constant {
        double value;
    };
    struct Variable {};
    struct Unary {
        UnaryOp op;
        std::shared_ptr<const Node> operand;
    };
    struct Binary {
        BinaryOp op;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    std::variant<Constant, Variable, Unary, Binary> data;
};

namespace {

const char* unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Neg: return "-";
        case UnaryOp::Exp: return "exp";
        case UnaryOp::Log: return "log";
        case UnaryOp::Sqrt: return "sqrt";
        case UnaryOp::Sin: return "sin";
        case UnaryOp::Cos: return "cos";
    }
    return "?";
}

char binary_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return '+';
        case BinaryOp::Sub: return '-';
        case BinaryOp::Mul: return '*';
        case BinaryOp::Div: return '/';
        case BinaryOp::Pow: return '^';
    }
    return '?';
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

// Value/derivative pair for forward-mode evaluation. With Tangent=false only
// `v` is touched.
struct Dual {
    double v;
    double d;
};

template <bool Tangent>
Dual eval_node(const Node& node, double r) {
    return std::visit(
        [&](const auto& n) -> Dual {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Node::Constant>) {
                return {n.value, 0.0};
            } else if constexpr (std::is_same_v<T, Node::Variable>) {
                return {r, 1.0};
            } else if constexpr (std::is_same_v<T, Node::Unary>) {
                const Dual a = eval_node<Tangent>(*n.operand, r);
                switch (n.op) {
                    case UnaryOp::Neg: return {-a.v, -a.d};
                    case UnaryOp::Exp: {
                        const double e = checked(std::exp(a.v), "exp");
                        return {e, Tangent ? e * a.d : 0.0};
                    }
                    case UnaryOp::Log:
                        if (!(a.v > 0.0)) throw DomainError("log of non-positive argument");
                        return {std::log(a.v), Tangent ? a.d / a.v : 0.0};
                    case UnaryOp::Sqrt: {
                        if (a.v < 0.0) throw DomainError("sqrt of negative argument");
                        const double s = std::sqrt(a.v);
                        if (!Tangent) return {s, 0.0};
                        if (s == 0.0) throw DomainError("sqrt is not differentiable at 0");
                        return {s, a.d / (2.0 * s)};
                    }
                    case UnaryOp::Sin: return {std::sin(a.v), Tangent ? std::cos(a.v) * a.d : 0.0};
                    case UnaryOp::Cos: return {std::cos(a.v), Tangent ? -std::sin(a.v) * a.d : 0.0};
                }
                throw DomainError("unknown unary operator");
            } else {
                const Dual a = eval_node<Tangent>(*n.lhs, r);
                const Dual b = eval_node<Tangent>(*n.rhs, r);
                switch (n.op) {
                    case BinaryOp::Add: return {checked(a.v + b.v, "+"), a.d + b.d};
                    case BinaryOp::Sub: return {checked(a.v - b.v, "-"), a.d - b.d};
                    case BinaryOp::Mul: return {checked(a.v * b.v, "*"), a.d * b.v + a.v * b.d};
                    case BinaryOp::Div: {
                        if (b.v == 0.0) throw DomainError("division by zero");
                        const double q = checked(a.v / b.v, "/");
                        return {q, Tangent ? (a.d - q * b.d) / b.v : 0.0};
                    }
                    case BinaryOp::Pow: {
                        const double p = std::pow(a.v, b.v);
                        if (std::isnan(p)) throw DomainError("power of negative base with non-integer exponent");
                        checked(p, "^");
                        if (!Tangent) return {p, 0.0};
                        double d = 0.0;
                        if (a.d != 0.0) {
                            if (a.v == 0.0 && b.v < 1.0) throw DomainError("power is not differentiable at 0");
                            d += b.v * std::pow(a.v, b.v - 1.0) * a.d;
                        }
                        if (b.d != 0.0) {
                            if (!(a.v > 0.0)) throw DomainError("power with variable exponent needs a positive base");
                            d += p * std::log(a.v) * b.d;
                        }
                        return {p, d};
                    }
                }
                throw DomainError("unknown binary operator");
            }
        },
        node.data);
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void print_node(const Node& node, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Node::Constant>) {
                if (std::signbit(n.value)) {
                    out += "(-" + format_double(-n.value) + ")";
                } else {
                    out += format_double(n.value);
                }
            } else if constexpr (std::is_same_v<T, Node::Variable>) {
                out += 'r';
            } else if constexpr (std::is_same_v<T, Node::Unary>) {
                if (n.op == UnaryOp::Neg) {
                    out += "(-";
                    print_node(*n.operand, out);
                    out += ')';
                } else {
                    out += unary_name(n.op);
                    out += '(';
                    print_node(*n.operand, out);
                    out += ')';
                }
            } else {
                out += '(';
                print_node(*n.lhs, out);
                out += ' ';
                out += binary_symbol(n.op);
                out += ' ';
                print_node(*n.rhs, out);
                out += ')';
            }
        },
        node.data);
}

// Recursive-descent parser.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expression parse_all() {
        Expression e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail({"operator", "end of input"});
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r'))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string msg = "syntax error at offset " + std::to_string(pos_) + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
            msg += expected[i];
        }
        if (pos_ < text_.size()) {
            msg += ", found '";
            msg += text_[pos_];
            msg += "'";
        } else {
            msg += ", found end of input";
        }
        throw ParseError(ParseError::Kind::Syntax, pos_, std::move(expected), msg);
    }

    Expression parse_sum() {
        Expression lhs = parse_product();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            Expression rhs = parse_product();
            lhs = Expression::binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs);
        }
    }

    Expression parse_product() {
        Expression lhs = parse_unary();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            Expression rhs = parse_unary();
            lhs = Expression::binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, lhs, rhs);
        }
    }

    Expression parse_unary() {
        const char c = peek();
        if (c == '-') {
            ++pos_;
            return Expression::unary(UnaryOp::Neg, parse_unary());
        }
        if (c == '+') {
            ++pos_;
            return parse_unary();
        }
        return parse_power();
    }

    Expression parse_power() {
        Expression base = parse_primary();
        if (peek() == '^') {
            ++pos_;
            // Right-associative; the exponent may carry its own sign.
            return Expression::binary(BinaryOp::Pow, base, parse_unary());
        }
        return base;
    }

    Expression parse_primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expression inner = parse_sum();
            if (peek() != ')') fail({"')'"});
            ++pos_;
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_identifier();
        fail({"number", "'r'", "function", "'('"});
    }

    Expression parse_number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (end < text_.size() && text_[end] >= '0' && text_[end] <= '9') ++end, ++n;
            return n;
        };
        std::size_t n = digits();
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            n += digits();
        }
        if (n == 0) fail({"digit"});
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t save = end;
            ++end;
            if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
            if (digits() == 0) end = save;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
        if (ec != std::errc() || ptr != text_.data() + end) fail({"number"});
        pos_ = end;
        return Expression::constant(value);
    }

    Expression parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
                                       (text_[pos_] >= 'A' && text_[pos_] <= 'Z') ||
                                       (text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "r") return Expression::variable();

        static constexpr std::array<std::pair<std::string_view, UnaryOp>, 5> functions{{
            {"exp", UnaryOp::Exp},
            {"log", UnaryOp::Log},
            {"sqrt", UnaryOp::Sqrt},
            {"sin", UnaryOp::Sin},
            {"cos", UnaryOp::Cos},
        }};
        for (const auto& [fname, op] : functions) {
            if (name != fname) continue;
            if (peek() != '(') fail({"'('"});
            ++pos_;
            Expression arg = parse_sum();
            if (peek() != ')') fail({"')'"});
            ++pos_;
            return Expression::unary(op, arg);
        }
        throw ParseError(ParseError::Kind::UnknownIdentifier, start, {"'r'", "exp", "log", "sqrt", "sin", "cos"},
                         "unknown identifier '" + std::string(name) + "' at offset " + std::to_string(start));
    }
};

}  // namespace

Expression Expression::constant(double value) {
    if (!std::isfinite(value)) throw DomainError("expression constants must be finite");
    return Expression(std::make_shared<const Node>(Node{Node::Constant{value}}));
}

Expression Expression::variable() { return Expression(std::make_shared<const Node>(Node{Node::Variable{}})); }

Expression Expression::unary(UnaryOp op, Expression operand) {
    return Expression(std::make_shared<const Node>(Node{Node::Unary{op, std::move(operand.root_)}}));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
    return Expression(
        std::make_shared<const Node>(Node{Node::Binary{op, std::move(lhs.root_), std::move(rhs.root_)}}));
}

double Expression::operator()(double r) const { return eval_node<false>(*root_, r).v; }

Expression::Derivative Expression::differentiate(double r) const {
    const Dual d = eval_node<true>(*root_, r);
    if (!std::isfinite(d.d)) throw DomainError("non-finite derivative");
    return {d.v, d.d};
}

std::string Expression::to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

Expression parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace liepnm::expr
