#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csfd/errors.hpp"
#include "csfd/jet.hpp"

namespace csfd {

// Small expression language for problem data: literals, variables
// x,y,z / x1..xd, + - * / ^, unary minus, exp ln sin cos tan tanh sqrt,
// constants pi and e. `^` with a constant integer exponent becomes repeated
// squaring; any other exponent is rewritten to exp(rhs*ln(lhs)) at parse
// time.

enum class Fn { Exp, Ln, Sin, Cos, Tan, Tanh, Sqrt };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Number, Variable, Binary, Unary, Neg, PowInt };
    Kind kind;
    double number = 0.0;
    int var = -1;     // 0-based axis
    char op = 0;      // '+', '-', '*', '/'
    Fn fn = Fn::Exp;
    long ipow = 0;
    ExprPtr lhs, rhs;
};

namespace expr_detail {

inline ExprPtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Number;
    n->number = v;
    return n;
}
inline ExprPtr make_variable(int axis) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->var = axis;
    return n;
}
inline ExprPtr make_binary(char op, ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}
inline ExprPtr make_unary(Fn fn, ExprPtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->fn = fn;
    n->lhs = std::move(a);
    return n;
}
inline ExprPtr make_neg(ExprPtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Neg;
    n->lhs = std::move(a);
    return n;
}
inline ExprPtr make_pow_int(ExprPtr base, long e) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::PowInt;
    n->ipow = e;
    n->lhs = std::move(base);
    return n;
}

inline std::string fn_name(Fn f) {
    switch (f) {
        case Fn::Exp: return "exp";
        case Fn::Ln: return "ln";
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Tan: return "tan";
        case Fn::Tanh: return "tanh";
        case Fn::Sqrt: return "sqrt";
    }
    return "?";
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string variable_name(int axis, int dim) {
    if (dim <= 3) {
        static const char* xyz[] = {"x", "y", "z"};
        return xyz[axis];
    }
    return "x" + std::to_string(axis + 1);
}

// Precedence: ^ (3) > unary minus (2.5, printed as level 2) > * / (2) > + - (1).
inline void print_node(const ExprNode* n, std::string& out, int parent_prec, int dim) {
    auto wrap = [&](int prec, auto&& body) {
        const bool paren = prec < parent_prec;
        if (paren) out += '(';
        body();
        if (paren) out += ')';
    };
    switch (n->kind) {
        case ExprNode::Kind::Number:
            if (n->number < 0) {
                wrap(2, [&] { out += format_number(n->number); });
            } else {
                out += format_number(n->number);
            }
            break;
        case ExprNode::Kind::Variable:
            out += variable_name(n->var, dim);
            break;
        case ExprNode::Kind::Binary: {
            const int prec = (n->op == '+' || n->op == '-') ? 1 : 2;
            wrap(prec, [&] {
                print_node(n->lhs.get(), out, prec, dim);
                out += n->op;
                // Right operand of - and / binds one level tighter.
                print_node(n->rhs.get(), out,
                           (n->op == '-' || n->op == '/') ? prec + 1 : prec, dim);
            });
            break;
        }
        case ExprNode::Kind::Unary:
            out += fn_name(n->fn);
            out += '(';
            print_node(n->lhs.get(), out, 0, dim);
            out += ')';
            break;
        case ExprNode::Kind::Neg:
            wrap(2, [&] {
                out += '-';
                print_node(n->lhs.get(), out, 3, dim);
            });
            break;
        case ExprNode::Kind::PowInt:
            wrap(3, [&] {
                print_node(n->lhs.get(), out, 4, dim);
                out += '^';
                if (n->ipow < 0) {
                    out += "(" + std::to_string(n->ipow) + ")";
                } else {
                    out += std::to_string(n->ipow);
                }
            });
            break;
    }
}

inline bool equal(const ExprNode* a, const ExprNode* b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprNode::Kind::Number: return a->number == b->number;
        case ExprNode::Kind::Variable: return a->var == b->var;
        case ExprNode::Kind::Binary:
            return a->op == b->op && equal(a->lhs.get(), b->lhs.get()) &&
                   equal(a->rhs.get(), b->rhs.get());
        case ExprNode::Kind::Unary:
            return a->fn == b->fn && equal(a->lhs.get(), b->lhs.get());
        case ExprNode::Kind::Neg: return equal(a->lhs.get(), b->lhs.get());
        case ExprNode::Kind::PowInt:
            return a->ipow == b->ipow && equal(a->lhs.get(), b->lhs.get());
    }
    return false;
}

// Algebra adapters so one evaluator covers doubles and both jet kinds.
struct ScalarAlgebra {
    using value_type = double;
    std::span<const double> point;
    double constant(double v) const { return v; }
    double variable(int axis) const { return point[static_cast<std::size_t>(axis)]; }
    static double value_of(double v) { return v; }
    static double add(double a, double b) { return a + b; }
    static double sub(double a, double b) { return a - b; }
    static double mul(double a, double b) { return a * b; }
    static double div(double a, double b) { return a / b; }
    static double neg(double a) { return -a; }
    static double pow_int(double a, long n) { return std::pow(a, static_cast<double>(n)); }
    static double apply(Fn f, double a) {
        switch (f) {
            case Fn::Exp: return std::exp(a);
            case Fn::Ln: return std::log(a);
            case Fn::Sin: return std::sin(a);
            case Fn::Cos: return std::cos(a);
            case Fn::Tan: return std::tan(a);
            case Fn::Tanh: return std::tanh(a);
            case Fn::Sqrt: return std::sqrt(a);
        }
        return 0.0;
    }
};

struct Jet1Algebra {
    using value_type = Jet1;
    double x;
    int order;
    Jet1 constant(double v) const { return Jet1::constant(v, x, order); }
    Jet1 variable(int) const { return Jet1::variable(x, order); }
    static double value_of(const Jet1& j) { return j.value(); }
    static Jet1 add(const Jet1& a, const Jet1& b) { return a + b; }
    static Jet1 sub(const Jet1& a, const Jet1& b) { return a - b; }
    static Jet1 mul(const Jet1& a, const Jet1& b) { return a * b; }
    static Jet1 div(const Jet1& a, const Jet1& b) { return a / b; }
    static Jet1 neg(const Jet1& a) { return -a; }
    static Jet1 pow_int(const Jet1& a, long n) { return jet1_detail::pow_int(a, n); }
    static Jet1 apply(Fn f, const Jet1& a) {
        switch (f) {
            case Fn::Exp: return jet1_detail::exp(a);
            case Fn::Ln: return jet1_detail::log(a);
            case Fn::Sin: {
                Jet1 s(a.center(), a.order()), c(a.center(), a.order());
                jet1_detail::sincos(a, s, c);
                return s;
            }
            case Fn::Cos: {
                Jet1 s(a.center(), a.order()), c(a.center(), a.order());
                jet1_detail::sincos(a, s, c);
                return c;
            }
            case Fn::Tan: return jet1_detail::tan_like(a, false);
            case Fn::Tanh: return jet1_detail::tan_like(a, true);
            case Fn::Sqrt: return jet1_detail::sqrt(a);
        }
        return a;
    }
};

struct JetNAlgebra {
    using value_type = JetN;
    std::span<const double> point;
    int order;
    JetN constant(double v) const { return JetN::constant(v, point, order); }
    JetN variable(int axis) const { return JetN::variable(axis, point, order); }
    static double value_of(const JetN& j) { return j.value(); }
    static JetN add(const JetN& a, const JetN& b) { return a + b; }
    static JetN sub(const JetN& a, const JetN& b) { return a - b; }
    static JetN mul(const JetN& a, const JetN& b) { return a * b; }
    static JetN div(const JetN& a, const JetN& b) { return a / b; }
    static JetN neg(const JetN& a) { return -a; }
    static JetN pow_int(const JetN& a, long n) { return jetn_detail::pow_int(a, n); }
    static JetN apply(Fn f, const JetN& a) {
        switch (f) {
            case Fn::Exp: return jetn_detail::exp(a);
            case Fn::Ln: return jetn_detail::log(a);
            case Fn::Sin: return jetn_detail::sin(a);
            case Fn::Cos: return jetn_detail::cos(a);
            case Fn::Tan: return jetn_detail::tan(a);
            case Fn::Tanh: return jetn_detail::tanh(a);
            case Fn::Sqrt: return jetn_detail::sqrt(a);
        }
        return a;
    }
};

std::string to_string_impl(const ExprNode* n, int dim);

template <class Alg>
typename Alg::value_type eval_node(const ExprNode* n, const Alg& alg, int dim) {
    using V = typename Alg::value_type;
    auto fail = [&](const std::string& what) -> V {
        throw SingularityError(what + " in subexpression '" + to_string_impl(n, dim) + "'");
    };
    switch (n->kind) {
        case ExprNode::Kind::Number: return alg.constant(n->number);
        case ExprNode::Kind::Variable: return alg.variable(n->var);
        case ExprNode::Kind::Neg: return Alg::neg(eval_node(n->lhs.get(), alg, dim));
        case ExprNode::Kind::Binary: {
            V a = eval_node(n->lhs.get(), alg, dim);
            V b = eval_node(n->rhs.get(), alg, dim);
            switch (n->op) {
                case '+': return Alg::add(a, b);
                case '-': return Alg::sub(a, b);
                case '*': return Alg::mul(a, b);
                default:
                    if (Alg::value_of(b) == 0.0) return fail("division by zero");
                    return Alg::div(a, b);
            }
        }
        case ExprNode::Kind::Unary: {
            V a = eval_node(n->lhs.get(), alg, dim);
            const double v = Alg::value_of(a);
            if ((n->fn == Fn::Ln || n->fn == Fn::Sqrt) && v <= 0.0)
                return fail(fn_name(n->fn) + " of a nonpositive value");
            return Alg::apply(n->fn, a);
        }
        case ExprNode::Kind::PowInt: {
            V a = eval_node(n->lhs.get(), alg, dim);
            if (n->ipow < 0 && Alg::value_of(a) == 0.0)
                return fail("zero raised to a negative power");
            return Alg::pow_int(a, n->ipow);
        }
    }
    throw Error("unreachable expression kind");
}

inline std::string to_string_impl(const ExprNode* n, int dim) {
    std::string out;
    print_node(n, out, 0, dim);
    return out;
}

} // namespace expr_detail

class Expression {
public:
    Expression() = default;
    Expression(ExprPtr root, int dim) : root_(std::move(root)), dim_(dim) {}

    bool valid() const { return root_ != nullptr; }
    int dim() const { return dim_; }

    double evaluate(std::span<const double> point) const {
        check_point(point.size());
        expr_detail::ScalarAlgebra alg{point};
        return expr_detail::eval_node(root_.get(), alg, dim_);
    }
    double evaluate(std::initializer_list<double> point) const {
        return evaluate(std::span<const double>(point.begin(), point.size()));
    }

    Jet1 jet1(double x, int order) const {
        if (dim_ != 1) throw UsageError("jet1 evaluation requires a 1-D expression");
        expr_detail::Jet1Algebra alg{x, order};
        return expr_detail::eval_node(root_.get(), alg, dim_);
    }

    JetN jetn(std::span<const double> point, int order) const {
        check_point(point.size());
        expr_detail::JetNAlgebra alg{point, order};
        return expr_detail::eval_node(root_.get(), alg, dim_);
    }

    std::string to_string() const { return expr_detail::to_string_impl(root_.get(), dim_); }

    bool structurally_equal(const Expression& other) const {
        return dim_ == other.dim_ && expr_detail::equal(root_.get(), other.root_.get());
    }

private:
    void check_point(std::size_t n) const {
        if (static_cast<int>(n) != dim_)
            throw UsageError("evaluation point dimension mismatch");
    }

    ExprPtr root_;
    int dim_ = 0;
};

namespace expr_detail {

class Parser {
public:
    Parser(std::string_view text, int dim) : text_(text), dim_(dim) {
        if (dim < 1) throw UsageError("expression dimension must be positive");
    }

    ExprPtr parse() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            skip_ws();
            if (peek() == '+' || peek() == '-') {
                const char op = advance();
                e = make_binary(op, e, parse_term());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() == '*' || peek() == '/') {
                const char op = advance();
                e = make_binary(op, e, parse_factor());
            } else {
                return e;
            }
        }
    }

    // factor := '-' factor | power
    ExprPtr parse_factor() {
        skip_ws();
        if (peek() == '-') {
            advance();
            return make_neg(parse_factor());
        }
        return parse_power();
    }

    // power := atom ['^' factor], right-associative via the recursive rhs.
    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        skip_ws();
        if (peek() != '^') return base;
        advance();
        ExprPtr expo = parse_factor();
        return make_pow(base, expo);
    }

    ExprPtr make_pow(ExprPtr base, ExprPtr expo) {
        // Constant integer exponents use repeated squaring; everything else
        // is rewritten to exp(expo*ln(base)).
        if (auto v = constant_value(expo.get())) {
            const double e = *v;
            if (std::nearbyint(e) == e && std::abs(e) <= 1e9)
                return make_pow_int(base, static_cast<long>(e));
        }
        return make_unary(Fn::Exp, make_binary('*', expo, make_unary(Fn::Ln, base)));
    }

    static std::optional<double> constant_value(const ExprNode* n) {
        switch (n->kind) {
            case ExprNode::Kind::Number: return n->number;
            case ExprNode::Kind::Neg: {
                auto v = constant_value(n->lhs.get());
                if (v) return -*v;
                return std::nullopt;
            }
            default: return std::nullopt;
        }
    }

    ExprPtr parse_atom() {
        skip_ws();
        const std::size_t start = pos_;
        const char c = peek();
        if (c == '(') {
            advance();
            ExprPtr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name = parse_ident();
            skip_ws();
            if (peek() == '(') {
                advance();
                ExprPtr arg = parse_sum();
                expect(')');
                return make_call(name, std::move(arg), start);
            }
            return make_leaf(name, start);
        }
        throw SyntaxError("syntax error", pos_);
    }

    ExprPtr make_call(const std::string& name, ExprPtr arg, std::size_t at) {
        if (name == "exp") return make_unary(Fn::Exp, arg);
        if (name == "ln" || name == "log") return make_unary(Fn::Ln, arg);
        if (name == "sin") return make_unary(Fn::Sin, arg);
        if (name == "cos") return make_unary(Fn::Cos, arg);
        if (name == "tan") return make_unary(Fn::Tan, arg);
        if (name == "tanh") return make_unary(Fn::Tanh, arg);
        if (name == "sqrt") return make_unary(Fn::Sqrt, arg);
        throw SyntaxError("unknown function '" + name + "'", at);
    }

    ExprPtr make_leaf(const std::string& name, std::size_t at) {
        if (name == "pi") return make_number(M_PI);
        if (name == "e") return make_number(M_E);
        int axis = -1;
        if (name == "x") axis = 0;
        else if (name == "y") axis = 1;
        else if (name == "z") axis = 2;
        else if (name.size() >= 2 && name[0] == 'x' &&
                 name.find_first_not_of("0123456789", 1) == std::string::npos)
            axis = std::stoi(name.substr(1)) - 1;
        if (axis < 0) throw SyntaxError("unknown identifier '" + name + "'", at);
        // x,y,z spellings are only meaningful through dimension 3.
        if ((name == "y" && dim_ < 2) || (name == "z" && dim_ < 3) || axis >= dim_)
            throw SyntaxError("variable '" + name + "' exceeds dimension " +
                                  std::to_string(dim_),
                              at);
        return make_variable(axis);
    }

    ExprPtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw SyntaxError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return make_number(v);
    }

    std::string parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char advance() { return text_[pos_++]; }
    void expect(char c) {
        skip_ws();
        if (peek() != c)
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        advance();
    }

    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;
};

} // namespace expr_detail

inline Expression parse_expression(std::string_view text, int dim) {
    expr_detail::Parser p(text, dim);
    return Expression(p.parse(), dim);
}

} // namespace csfd
