#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "synectic/errors.hpp"
#include "synectic/jet.hpp"

namespace synectic {

// Scalar expression language for model files.  Variables are x1..xn,
// operators + - * / ^ with standard precedence (^ right-associative and
// binding tighter than unary minus), functions sin cos tan exp log sqrt.
//
// The same tree evaluates over double, Jet1 and Jet2, so model authors get
// exact derivatives without writing any.

enum class ExprKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double number = 0.0;   // Number
    std::size_t var = 0;   // Var, 0-based
    Fn fn = Fn::Sin;       // Call
    ExprPtr a, b;          // operands
    std::size_t offset = 0;  // byte position in the source text
};

// Raised when evaluation leaves a function's domain; carries the printed
// subexpression and the coordinate values in its message.
struct EvalDomainError : DomainError {
    using DomainError::DomainError;
};

inline std::string_view fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Tan: return "tan";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Sqrt: return "sqrt";
    }
    return "?";
}

namespace detail {

inline int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Neg: return 3;
        case ExprKind::Pow: return 4;
        default: return 5;
    }
}

inline void print_number(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline void print_node(std::string& out, const Expr& e, int min_prec) {
    const int p = precedence(e.kind);
    const bool parens = p < min_prec;
    if (parens) out.push_back('(');
    switch (e.kind) {
        case ExprKind::Number:
            print_number(out, e.number);
            break;
        case ExprKind::Var:
            out.push_back('x');
            print_number(out, static_cast<double>(e.var + 1));
            break;
        case ExprKind::Neg:
            out.push_back('-');
            print_node(out, *e.a, 3);
            break;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div: {
            print_node(out, *e.a, p);
            char op = e.kind == ExprKind::Add   ? '+'
                      : e.kind == ExprKind::Sub ? '-'
                      : e.kind == ExprKind::Mul ? '*'
                                                : '/';
            out.push_back(op);
            print_node(out, *e.b, p + 1);
            break;
        }
        case ExprKind::Pow:
            print_node(out, *e.a, 5);  // base must be an atom
            out.push_back('^');
            print_node(out, *e.b, 3);  // exponent is unary-level
            break;
        case ExprKind::Call:
            out.append(fn_name(e.fn));
            out.push_back('(');
            print_node(out, *e.a, 0);
            out.push_back(')');
            break;
    }
    if (parens) out.push_back(')');
}

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr run() {
        skip_ws();
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t'))
            ++pos_;
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    bool consume(char c) {
        if (!at_end() && src_[pos_] == c) {
            ++pos_;
            skip_ws();
            return true;
        }
        return false;
    }

    ExprPtr make(Expr e) { return std::make_shared<Expr>(std::move(e)); }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_term();
        for (;;) {
            std::size_t at = pos_;
            if (consume('+'))
                lhs = make({ExprKind::Add, 0, 0, Fn::Sin, lhs, parse_term(), at});
            else if (consume('-'))
                lhs = make({ExprKind::Sub, 0, 0, Fn::Sin, lhs, parse_term(), at});
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            std::size_t at = pos_;
            if (consume('*'))
                lhs = make({ExprKind::Mul, 0, 0, Fn::Sin, lhs, parse_unary(), at});
            else if (consume('/'))
                lhs = make({ExprKind::Div, 0, 0, Fn::Sin, lhs, parse_unary(), at});
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        std::size_t at = pos_;
        if (consume('-'))
            return make({ExprKind::Neg, 0, 0, Fn::Sin, parse_unary(), nullptr, at});
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        std::size_t at = pos_;
        if (consume('^'))
            return make({ExprKind::Pow, 0, 0, Fn::Sin, base, parse_unary(), at});
        return base;
    }

    ExprPtr parse_atom() {
        if (at_end()) throw ParseError("unexpected end of expression", pos_);
        std::size_t at = pos_;
        char c = peek();

        if (c == '(') {
            ++pos_;
            skip_ws();
            ExprPtr e = parse_sum();
            if (!consume(')')) throw ParseError("expected ')'", pos_);
            return e;
        }

        if ((c >= '0' && c <= '9') || c == '.') return parse_number();

        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
            return parse_identifier();

        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        (void)at;
    }

    ExprPtr parse_number() {
        std::size_t at = pos_;
        double value = 0.0;
        auto res = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value);
        if (res.ec != std::errc())
            throw ParseError("malformed number", at);
        pos_ = static_cast<std::size_t>(res.ptr - src_.data());
        skip_ws();
        return make({ExprKind::Number, value, 0, Fn::Sin, nullptr, nullptr, at});
    }

    ExprPtr parse_identifier() {
        std::size_t at = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            ++pos_;
        std::string_view word = src_.substr(at, pos_ - at);
        skip_ws();

        if (word.size() >= 2 && word[0] == 'x' && word[1] != '0') {
            bool digits = true;
            for (std::size_t i = 1; i < word.size(); ++i)
                if (word[i] < '0' || word[i] > '9') digits = false;
            if (digits) {
                std::size_t k = 0;
                for (std::size_t i = 1; i < word.size(); ++i)
                    k = k * 10 + static_cast<std::size_t>(word[i] - '0');
                return make({ExprKind::Var, 0, k - 1, Fn::Sin, nullptr, nullptr, at});
            }
        }

        std::optional<Fn> fn;
        if (word == "sin") fn = Fn::Sin;
        else if (word == "cos") fn = Fn::Cos;
        else if (word == "tan") fn = Fn::Tan;
        else if (word == "exp") fn = Fn::Exp;
        else if (word == "log") fn = Fn::Log;
        else if (word == "sqrt") fn = Fn::Sqrt;

        if (fn) {
            if (!consume('('))
                throw ParseError("expected '(' after function name", pos_);
            ExprPtr arg = parse_sum();
            if (!consume(')')) throw ParseError("expected ')'", pos_);
            return make({ExprKind::Call, 0, 0, *fn, arg, nullptr, at});
        }

        throw ParseError("unknown identifier '" + std::string(word) + "'", at);
    }
};

}  // namespace detail

inline std::string print_expr(const Expr& e) {
    std::string out;
    detail::print_node(out, e, 0);
    return out;
}

inline std::string print_expr(const ExprPtr& e) { return print_expr(*e); }

inline ExprPtr parse_expr(std::string_view src) { return detail::Parser(src).run(); }

// Largest 1-based variable index referenced, 0 when the expression is constant.
inline std::size_t max_var_index(const Expr& e) {
    std::size_t m = 0;
    if (e.kind == ExprKind::Var) m = e.var + 1;
    if (e.a) m = std::max(m, max_var_index(*e.a));
    if (e.b) m = std::max(m, max_var_index(*e.b));
    return m;
}

namespace detail {

// Integer exponents are recognized structurally (a possibly negated
// integral literal) and evaluated by repeated multiplication, which keeps
// x^2 defined at x = 0 where the exp/log route is not.
inline std::optional<long> integer_exponent(const Expr& e) {
    if (e.kind == ExprKind::Neg) {
        auto inner = integer_exponent(*e.a);
        if (inner) return -*inner;
        return std::nullopt;
    }
    if (e.kind != ExprKind::Number) return std::nullopt;
    double v = e.number;
    if (std::rint(v) != v || std::abs(v) > 1e9) return std::nullopt;
    return static_cast<long>(v);
}

template <class T>
std::string describe_point(std::span<const T> vars) {
    std::string s = "(";
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) s += ", ";
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, value_of(vars[i]));
        s.append(buf, res.ptr);
    }
    s += ")";
    return s;
}

template <class T>
T eval_node(const Expr& e, std::span<const T> vars) {
    using std::sin;
    using std::cos;
    using std::tan;
    using std::exp;
    using std::log;
    using std::sqrt;
    using std::pow;

    auto wrap = [&](const char* what) -> EvalDomainError {
        return EvalDomainError(std::string(what) + " in '" + print_expr(e) +
                               "' at x = " + describe_point(vars));
    };

    switch (e.kind) {
        case ExprKind::Number:
            return constant_like(vars[0], e.number);
        case ExprKind::Var:
            if (e.var >= vars.size())
                throw ShapeError("expression references x" + std::to_string(e.var + 1) +
                                 " but only " + std::to_string(vars.size()) +
                                 " variables are bound");
            return vars[e.var];
        case ExprKind::Neg:
            return -eval_node(*e.a, vars);
        case ExprKind::Add:
            return eval_node(*e.a, vars) + eval_node(*e.b, vars);
        case ExprKind::Sub:
            return eval_node(*e.a, vars) - eval_node(*e.b, vars);
        case ExprKind::Mul:
            return eval_node(*e.a, vars) * eval_node(*e.b, vars);
        case ExprKind::Div: {
            T num = eval_node(*e.a, vars);
            T den = eval_node(*e.b, vars);
            if (value_of(den) == 0.0) throw wrap("division by zero");
            return num / den;
        }
        case ExprKind::Pow: {
            T base = eval_node(*e.a, vars);
            if (auto k = integer_exponent(*e.b)) {
                if (*k < 0 && value_of(base) == 0.0)
                    throw wrap("zero base with negative exponent");
                return pow_int(base, *k);
            }
            T expo = eval_node(*e.b, vars);
            if (value_of(base) <= 0.0)
                throw wrap("fractional power of non-positive base");
            return exp(expo * log(base));
        }
        case ExprKind::Call: {
            T arg = eval_node(*e.a, vars);
            switch (e.fn) {
                case Fn::Sin: return sin(arg);
                case Fn::Cos: return cos(arg);
                case Fn::Tan: return tan(arg);
                case Fn::Exp: return exp(arg);
                case Fn::Log:
                    if (value_of(arg) <= 0.0) throw wrap("log of non-positive value");
                    return log(arg);
                case Fn::Sqrt:
                    if (value_of(arg) < 0.0 ||
                        (value_of(arg) == 0.0 && !std::is_same_v<T, double>))
                        throw wrap("sqrt outside domain");
                    if constexpr (std::is_same_v<T, double>) return std::sqrt(arg);
                    else return sqrt(arg);
            }
        }
    }
    throw DomainError("corrupt expression node");
}

}  // namespace detail

template <class T>
T eval_expr(const Expr& e, std::span<const T> vars) {
    if (vars.empty()) throw ShapeError("expression evaluation needs at least one variable");
    return detail::eval_node(e, vars);
}

inline double eval_value(const Expr& e, std::span<const double> x) {
    return eval_expr<double>(e, x);
}

inline Jet2 eval_jet2(const Expr& e, std::span<const double> x) {
    std::vector<Jet2> vars;
    vars.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        vars.push_back(jet2_var(x[i], x.size(), i));
    return eval_expr<Jet2>(e, std::span<const Jet2>(vars));
}

}  // namespace synectic
