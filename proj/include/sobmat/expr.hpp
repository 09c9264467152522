#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sobmat {

/// Syntax error while parsing an expression; carries the byte offset of the
/// offending character in the source text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Domain failure during evaluation (division by zero, sqrt of a negative);
/// carries the offending subexpression rendered back to text.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, std::string subexpr)
        : std::runtime_error(what + " in subexpression: " + subexpr),
          subexpr_(std::move(subexpr)) {}

    const std::string& subexpr() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

enum class ExprKind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

enum class Builtin { Exp, Sin, Cos, Sqrt };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree over the single variable z.
struct ExprNode {
    ExprKind kind;
    double value = 0.0;              // Constant
    int exponent = 0;                // Pow, always >= 0
    Builtin builtin = Builtin::Exp;  // Call
    ExprPtr lhs;                     // unary operand / left operand / call argument
    ExprPtr rhs;                     // right operand
};

inline ExprPtr make_constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Constant;
    n->value = v;
    return n;
}

inline ExprPtr make_variable() {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Variable;
    return n;
}

inline ExprPtr make_unary(ExprKind kind, ExprPtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(operand);
    return n;
}

inline ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

inline ExprPtr make_pow(ExprPtr base, int exponent) {
    if (exponent < 0) throw std::invalid_argument("power exponent must be >= 0");
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Pow;
    n->exponent = exponent;
    n->lhs = std::move(base);
    return n;
}

inline ExprPtr make_call(Builtin b, ExprPtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Call;
    n->builtin = b;
    n->lhs = std::move(arg);
    return n;
}

inline const char* builtin_name(Builtin b) {
    switch (b) {
        case Builtin::Exp: return "exp";
        case Builtin::Sin: return "sin";
        case Builtin::Cos: return "cos";
        case Builtin::Sqrt: return "sqrt";
    }
    return "?";
}

/// Renders the tree back to parseable text. Composite nodes are fully
/// parenthesized and constants use %.17g, so re-parsing reproduces the exact
/// evaluation behaviour.
inline std::string to_string(const ExprNode& e) {
    switch (e.kind) {
        case ExprKind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", e.value);
            // Negative constants get parens so they stay atomic inside any context.
            if (e.value < 0.0 || std::signbit(e.value)) return std::string("(") + buf + ")";
            return buf;
        }
        case ExprKind::Variable: return "z";
        case ExprKind::Negate: return "(-" + to_string(*e.lhs) + ")";
        case ExprKind::Add: return "(" + to_string(*e.lhs) + "+" + to_string(*e.rhs) + ")";
        case ExprKind::Sub: return "(" + to_string(*e.lhs) + "-" + to_string(*e.rhs) + ")";
        case ExprKind::Mul: return "(" + to_string(*e.lhs) + "*" + to_string(*e.rhs) + ")";
        case ExprKind::Div: return "(" + to_string(*e.lhs) + "/" + to_string(*e.rhs) + ")";
        case ExprKind::Pow:
            return "(" + to_string(*e.lhs) + "^" + std::to_string(e.exponent) + ")";
        case ExprKind::Call:
            return std::string(builtin_name(e.builtin)) + "(" + to_string(*e.lhs) + ")";
    }
    return "?";
}

inline std::string to_string(const ExprPtr& e) { return to_string(*e); }

/// Recursive evaluation in double precision.
inline double eval_expr(const ExprNode& e, double z) {
    switch (e.kind) {
        case ExprKind::Constant: return e.value;
        case ExprKind::Variable: return z;
        case ExprKind::Negate: return -eval_expr(*e.lhs, z);
        case ExprKind::Add: return eval_expr(*e.lhs, z) + eval_expr(*e.rhs, z);
        case ExprKind::Sub: return eval_expr(*e.lhs, z) - eval_expr(*e.rhs, z);
        case ExprKind::Mul: return eval_expr(*e.lhs, z) * eval_expr(*e.rhs, z);
        case ExprKind::Div: {
            const double den = eval_expr(*e.rhs, z);
            if (den == 0.0) throw EvalError("division by zero", to_string(e));
            return eval_expr(*e.lhs, z) / den;
        }
        case ExprKind::Pow: {
            double base = eval_expr(*e.lhs, z);
            double acc = 1.0;
            for (int k = 0; k < e.exponent; ++k) acc *= base;
            return acc;
        }
        case ExprKind::Call: {
            const double a = eval_expr(*e.lhs, z);
            switch (e.builtin) {
                case Builtin::Exp: return std::exp(a);
                case Builtin::Sin: return std::sin(a);
                case Builtin::Cos: return std::cos(a);
                case Builtin::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of a negative value", to_string(e));
                    return std::sqrt(a);
            }
            return 0.0;
        }
    }
    return 0.0;
}

inline double eval_expr(const ExprPtr& e, double z) { return eval_expr(*e, z); }

/// Degree bound of the expression as a polynomial in z, or nullopt when it is
/// not a polynomial (division by a non-constant, any builtin call). Exact for
/// expanded forms; additions may overestimate when leading terms cancel.
inline std::optional<int> expr_poly_degree(const ExprNode& e) {
    switch (e.kind) {
        case ExprKind::Constant: return 0;
        case ExprKind::Variable: return 1;
        case ExprKind::Negate: return expr_poly_degree(*e.lhs);
        case ExprKind::Add:
        case ExprKind::Sub: {
            auto l = expr_poly_degree(*e.lhs);
            auto r = expr_poly_degree(*e.rhs);
            if (!l || !r) return std::nullopt;
            return std::max(*l, *r);
        }
        case ExprKind::Mul: {
            auto l = expr_poly_degree(*e.lhs);
            auto r = expr_poly_degree(*e.rhs);
            if (!l || !r) return std::nullopt;
            return *l + *r;
        }
        case ExprKind::Div: {
            auto l = expr_poly_degree(*e.lhs);
            auto r = expr_poly_degree(*e.rhs);
            if (!l || !r || *r != 0) return std::nullopt;
            return *l;
        }
        case ExprKind::Pow: {
            auto l = expr_poly_degree(*e.lhs);
            if (!l) return std::nullopt;
            return *l * e.exponent;
        }
        case ExprKind::Call: return std::nullopt;
    }
    return std::nullopt;
}

inline std::optional<int> expr_poly_degree(const ExprPtr& e) { return expr_poly_degree(*e); }

namespace detail {

// Recursive-descent parser. Precedence, tightest first:
//   ^  (integer exponent)  >  unary -  >  * /  >  + -
// with left-associative binary operators and parenthesized grouping.
class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    ExprPtr parse() {
        if (src_.empty()) throw ParseError("empty expression", 0);
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = make_binary(ExprKind::Add, lhs, parse_product());
            else if (accept('-')) lhs = make_binary(ExprKind::Sub, lhs, parse_product());
            else return lhs;
        }
    }

    ExprPtr parse_product() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make_binary(ExprKind::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = make_binary(ExprKind::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-')) return make_unary(ExprKind::Negate, parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (accept('^')) {
            skip_ws();
            const std::size_t at = pos_;
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw ParseError("expected a nonnegative integer exponent", at);
            int exponent = 0;
            auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), exponent);
            if (ec != std::errc{}) throw ParseError("invalid integer exponent", at);
            pos_ = static_cast<std::size_t>(p - src_.data());
            return make_pow(base, exponent);
        }
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_sum();
            skip_ws();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // 'e' belonged to something else; not part of this number
            }
        }
        double v = 0.0;
        auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc{} || p != src_.data() + pos_)
            throw ParseError("invalid numeric literal", start);
        return make_constant(v);
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "z") return make_variable();
        Builtin b;
        if (name == "exp") b = Builtin::Exp;
        else if (name == "sin") b = Builtin::Sin;
        else if (name == "cos") b = Builtin::Cos;
        else if (name == "sqrt") b = Builtin::Sqrt;
        else throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        if (!accept('(')) throw ParseError("expected '(' after function name", pos_);
        ExprPtr arg = parse_sum();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return make_call(b, arg);
    }
};

}  // namespace detail

/// Parses expression text over the variable z. Throws ParseError with the
/// byte offset on malformed input.
inline ExprPtr parse_expr(std::string_view src) { return detail::ExprParser(src).parse(); }

}  // namespace sobmat
