#include "driftgauge/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace driftgauge::expr {

namespace {

NodePtr make(Kind k, double v, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

bool is_const(const NodePtr& n, double* out = nullptr) {
    if (n->kind != Kind::Constant) return false;
    if (out) *out = n->value;
    return true;
}

bool is_integer(double p) {
    return std::isfinite(p) && p == std::floor(p) && std::fabs(p) < 1e15;
}

double eval_pow(double base, double p, const NodePtr& node, double x);

std::string print_node(const NodePtr& n);

double eval_node(const NodePtr& n, double x) {
    switch (n->kind) {
    case Kind::Constant: return n->value;
    case Kind::Variable: return x;
    case Kind::Add: return eval_node(n->a, x) + eval_node(n->b, x);
    case Kind::Sub: return eval_node(n->a, x) - eval_node(n->b, x);
    case Kind::Mul: return eval_node(n->a, x) * eval_node(n->b, x);
    case Kind::Div: {
        double num = eval_node(n->a, x);
        double den = eval_node(n->b, x);
        if (den == 0.0) throw DomainError("division by zero in " + print_node(n), x);
        return num / den;
    }
    case Kind::Pow: return eval_pow(eval_node(n->a, x), n->value, n, x);
    case Kind::Neg: return -eval_node(n->a, x);
    case Kind::Exp: return std::exp(eval_node(n->a, x));
    case Kind::Log: {
        double v = eval_node(n->a, x);
        if (v <= 0.0) throw DomainError("log of non-positive value in " + print_node(n), x);
        return std::log(v);
    }
    case Kind::Sqrt: {
        double v = eval_node(n->a, x);
        if (v < 0.0) throw DomainError("sqrt of negative value in " + print_node(n), x);
        return std::sqrt(v);
    }
    case Kind::Abs: return std::fabs(eval_node(n->a, x));
    }
    throw std::logic_error("bad node kind");
}

double eval_pow(double base, double p, const NodePtr& node, double x) {
    if (base == 0.0) {
        if (p > 0.0) return 0.0;
        if (p == 0.0) return 1.0;
        throw DomainError("zero raised to negative power in " + print_node(node), x);
    }
    if (base < 0.0 && !is_integer(p))
        throw DomainError("negative base with non-integer exponent in " + print_node(node), x);
    return std::pow(base, p);
}

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int precedence(const NodePtr& n) {
    switch (n->kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
    }
}

std::string print_child(const NodePtr& child, int min_prec) {
    std::string s = print_node(child);
    if (precedence(child) < min_prec) return "(" + s + ")";
    return s;
}

std::string print_node(const NodePtr& n) {
    switch (n->kind) {
    case Kind::Constant: {
        if (n->value < 0.0) return "(" + fmt_double(n->value) + ")";
        return fmt_double(n->value);
    }
    case Kind::Variable: return "x";
    case Kind::Add: return print_child(n->a, 1) + "+" + print_child(n->b, 2);
    case Kind::Sub: return print_child(n->a, 1) + "-" + print_child(n->b, 2);
    case Kind::Mul: return print_child(n->a, 2) + "*" + print_child(n->b, 3);
    case Kind::Div: return print_child(n->a, 2) + "/" + print_child(n->b, 3);
    case Kind::Pow: {
        std::string base = print_child(n->a, 5);
        std::string e = fmt_double(n->value);
        if (n->value < 0.0) e = "(" + e + ")";
        return base + "^" + e;
    }
    case Kind::Neg: return "-" + print_child(n->a, 3);
    case Kind::Exp: return "exp(" + print_node(n->a) + ")";
    case Kind::Log: return "log(" + print_node(n->a) + ")";
    case Kind::Sqrt: return "sqrt(" + print_node(n->a) + ")";
    case Kind::Abs: return "abs(" + print_node(n->a) + ")";
    }
    throw std::logic_error("bad node kind");
}

bool same_node(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Kind::Constant:
    case Kind::Pow:
        if (!(a->value == b->value ||
              (std::isnan(a->value) && std::isnan(b->value))))
            return false;
        break;
    default: break;
    }
    if ((a->a != nullptr) != (b->a != nullptr)) return false;
    if ((a->b != nullptr) != (b->b != nullptr)) return false;
    if (a->a && !same_node(a->a, b->a)) return false;
    if (a->b && !same_node(a->b, b->b)) return false;
    return true;
}

// ---------------------------------------------------------------------
// Parser: recursive descent.
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          (right-assoc, via unary)
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
// '^' binds tighter than unary minus; the exponent subtree must
// constant-fold.
// ---------------------------------------------------------------------

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    NodePtr parse_expression() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+')) lhs = make(Kind::Add, 0, lhs, parse_term());
            else if (consume('-')) lhs = make(Kind::Sub, 0, lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (consume('*')) lhs = make(Kind::Mul, 0, lhs, parse_unary());
            else if (consume('/')) lhs = make(Kind::Div, 0, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return make(Kind::Neg, 0, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        skip_ws();
        if (consume('^')) {
            std::size_t at = pos;
            NodePtr e = parse_unary();
            std::optional<double> v = Expression::from_node(e).constant_value();
            if (!v) throw ParseError("exponent must be a constant expression", at);
            return make(Kind::Pow, *v, base);
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expression();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = text.data() + pos;
        const char* end = text.data() + text.size();
        double v = 0.0;
        auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc()) fail("malformed number");
        pos += static_cast<std::size_t>(res.ptr - begin);
        return make(Kind::Constant, v);
    }

    NodePtr parse_identifier() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string_view name = text.substr(start, pos - start);
        if (name == "x") return make(Kind::Variable, 0);
        if (name == "pi") return make(Kind::Constant, 3.14159265358979323846);
        if (name == "e") return make(Kind::Constant, 2.71828182845904523536);
        Kind fk;
        if (name == "exp") fk = Kind::Exp;
        else if (name == "log") fk = Kind::Log;
        else if (name == "sqrt") fk = Kind::Sqrt;
        else if (name == "abs") fk = Kind::Abs;
        else throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        if (!consume('(')) fail("expected '(' after function name");
        NodePtr arg = parse_expression();
        if (!consume(')')) fail("expected ')'");
        return make(fk, 0, arg);
    }
};

std::optional<double> fold_node(const NodePtr& n) {
    switch (n->kind) {
    case Kind::Constant: return n->value;
    case Kind::Variable: return std::nullopt;
    default: break;
    }
    std::optional<double> a = n->a ? fold_node(n->a) : std::nullopt;
    if (n->a && !a) return std::nullopt;
    std::optional<double> b = n->b ? fold_node(n->b) : std::nullopt;
    if (n->b && !b) return std::nullopt;
    switch (n->kind) {
    case Kind::Add: return *a + *b;
    case Kind::Sub: return *a - *b;
    case Kind::Mul: return *a * *b;
    case Kind::Div:
        if (*b == 0.0) return std::nullopt;
        return *a / *b;
    case Kind::Pow: {
        double base = *a, p = n->value;
        if (base == 0.0) return p > 0.0 ? std::optional<double>(0.0)
                                        : (p == 0.0 ? std::optional<double>(1.0) : std::nullopt);
        if (base < 0.0 && !is_integer(p)) return std::nullopt;
        return std::pow(base, p);
    }
    case Kind::Neg: return -*a;
    case Kind::Exp: return std::exp(*a);
    case Kind::Log: return *a > 0.0 ? std::optional<double>(std::log(*a)) : std::nullopt;
    case Kind::Sqrt: return *a >= 0.0 ? std::optional<double>(std::sqrt(*a)) : std::nullopt;
    case Kind::Abs: return std::fabs(*a);
    default: return std::nullopt;
    }
}

} // namespace

Expression Expression::constant(double v) { return Expression(make(Kind::Constant, v)); }
Expression Expression::variable() { return Expression(make(Kind::Variable, 0)); }

double Expression::operator()(double x) const { return eval_node(root_, x); }

std::string Expression::str() const { return print_node(root_); }

bool Expression::same_structure(const Expression& other) const {
    return same_node(root_, other.root_);
}

std::optional<double> Expression::constant_value() const { return fold_node(root_); }

Expression parse(std::string_view text) {
    Parser p{text};
    NodePtr root = p.parse_expression();
    if (!p.eof()) throw ParseError("trailing characters after expression", p.pos);
    return Expression::from_node(root);
}

// --- simplifying builders ---------------------------------------------

Expression add(const Expression& a, const Expression& b) {
    double ca, cb;
    bool fa = is_const(a.root(), &ca), fb = is_const(b.root(), &cb);
    if (fa && fb) return Expression::constant(ca + cb);
    if (fa && ca == 0.0) return b;
    if (fb && cb == 0.0) return a;
    return Expression::from_node(make(Kind::Add, 0, a.root(), b.root()));
}

Expression sub(const Expression& a, const Expression& b) {
    double ca, cb;
    bool fa = is_const(a.root(), &ca), fb = is_const(b.root(), &cb);
    if (fa && fb) return Expression::constant(ca - cb);
    if (fb && cb == 0.0) return a;
    if (fa && ca == 0.0) return neg(b);
    return Expression::from_node(make(Kind::Sub, 0, a.root(), b.root()));
}

Expression mul(const Expression& a, const Expression& b) {
    double ca, cb;
    bool fa = is_const(a.root(), &ca), fb = is_const(b.root(), &cb);
    if (fa && fb) return Expression::constant(ca * cb);
    if (fa && ca == 0.0) return Expression::constant(0.0);
    if (fb && cb == 0.0) return Expression::constant(0.0);
    if (fa && ca == 1.0) return b;
    if (fb && cb == 1.0) return a;
    return Expression::from_node(make(Kind::Mul, 0, a.root(), b.root()));
}

Expression div(const Expression& a, const Expression& b) {
    double ca, cb;
    bool fa = is_const(a.root(), &ca), fb = is_const(b.root(), &cb);
    if (fb && cb == 1.0) return a;
    if (fa && ca == 0.0) return Expression::constant(0.0);
    if (fa && fb && cb != 0.0) return Expression::constant(ca / cb);
    return Expression::from_node(make(Kind::Div, 0, a.root(), b.root()));
}

Expression pow(const Expression& base, double exponent) {
    if (exponent == 1.0) return base;
    if (exponent == 0.0) return Expression::constant(1.0);
    double cb;
    if (is_const(base.root(), &cb)) {
        if (cb > 0.0 || (cb == 0.0 && exponent > 0.0) || (cb < 0.0 && is_integer(exponent)))
            return Expression::constant(std::pow(cb, exponent));
    }
    return Expression::from_node(make(Kind::Pow, exponent, base.root()));
}

Expression neg(const Expression& a) {
    double c;
    if (is_const(a.root(), &c)) return Expression::constant(-c);
    if (a.root()->kind == Kind::Neg) return Expression::from_node(a.root()->a);
    return Expression::from_node(make(Kind::Neg, 0, a.root()));
}

Expression exp(const Expression& a) {
    double c;
    if (is_const(a.root(), &c)) return Expression::constant(std::exp(c));
    return Expression::from_node(make(Kind::Exp, 0, a.root()));
}

Expression log(const Expression& a) {
    double c;
    if (is_const(a.root(), &c) && c > 0.0) return Expression::constant(std::log(c));
    return Expression::from_node(make(Kind::Log, 0, a.root()));
}

Expression sqrt(const Expression& a) {
    double c;
    if (is_const(a.root(), &c) && c >= 0.0) return Expression::constant(std::sqrt(c));
    return Expression::from_node(make(Kind::Sqrt, 0, a.root()));
}

Expression abs(const Expression& a) {
    double c;
    if (is_const(a.root(), &c)) return Expression::constant(std::fabs(c));
    return Expression::from_node(make(Kind::Abs, 0, a.root()));
}

namespace {

Expression diff_node(const NodePtr& n) {
    auto E = [](NodePtr p) { return Expression::from_node(std::move(p)); };
    switch (n->kind) {
    case Kind::Constant: return Expression::constant(0.0);
    case Kind::Variable: return Expression::constant(1.0);
    case Kind::Add: return add(diff_node(n->a), diff_node(n->b));
    case Kind::Sub: return sub(diff_node(n->a), diff_node(n->b));
    case Kind::Mul:
        return add(mul(diff_node(n->a), E(n->b)), mul(E(n->a), diff_node(n->b)));
    case Kind::Div:
        return div(sub(mul(diff_node(n->a), E(n->b)), mul(E(n->a), diff_node(n->b))),
                   mul(E(n->b), E(n->b)));
    case Kind::Pow:
        return mul(mul(Expression::constant(n->value), pow(E(n->a), n->value - 1.0)),
                   diff_node(n->a));
    case Kind::Neg: return neg(diff_node(n->a));
    case Kind::Exp: return mul(exp(E(n->a)), diff_node(n->a));
    case Kind::Log: return div(diff_node(n->a), E(n->a));
    case Kind::Sqrt:
        return div(diff_node(n->a), mul(Expression::constant(2.0), sqrt(E(n->a))));
    case Kind::Abs:
        // d|u|/dx = u/|u| * u'; evaluating at u=0 divides by zero, which is
        // the required domain error.
        return mul(div(E(n->a), abs(E(n->a))), diff_node(n->a));
    }
    throw std::logic_error("bad node kind");
}

} // namespace

Expression Expression::derivative() const { return diff_node(root_); }

// --- power-sum decomposition -------------------------------------------

namespace {

constexpr std::size_t kMaxPowerTerms = 12;

void merge_term(std::vector<PowerTerm>& terms, double coeff, double exponent) {
    if (coeff == 0.0) return;
    for (auto& t : terms) {
        if (std::fabs(t.exponent - exponent) <= 1e-12 * (1.0 + std::fabs(exponent))) {
            t.coeff += coeff;
            return;
        }
    }
    terms.push_back({coeff, exponent});
}

std::optional<std::vector<PowerTerm>> decompose(const NodePtr& n) {
    using R = std::optional<std::vector<PowerTerm>>;
    switch (n->kind) {
    case Kind::Constant: return R(std::vector<PowerTerm>{{n->value, 0.0}});
    case Kind::Variable: return R(std::vector<PowerTerm>{{1.0, 1.0}});
    case Kind::Add:
    case Kind::Sub: {
        auto a = decompose(n->a);
        auto b = decompose(n->b);
        if (!a || !b) return std::nullopt;
        double sgn = n->kind == Kind::Add ? 1.0 : -1.0;
        for (const auto& t : *b) merge_term(*a, sgn * t.coeff, t.exponent);
        if (a->size() > kMaxPowerTerms) return std::nullopt;
        return a;
    }
    case Kind::Neg: {
        auto a = decompose(n->a);
        if (!a) return std::nullopt;
        for (auto& t : *a) t.coeff = -t.coeff;
        return a;
    }
    case Kind::Mul: {
        auto a = decompose(n->a);
        auto b = decompose(n->b);
        if (!a || !b) return std::nullopt;
        std::vector<PowerTerm> out;
        for (const auto& ta : *a)
            for (const auto& tb : *b) merge_term(out, ta.coeff * tb.coeff, ta.exponent + tb.exponent);
        if (out.size() > kMaxPowerTerms) return std::nullopt;
        return R(std::move(out));
    }
    case Kind::Div: {
        auto a = decompose(n->a);
        auto b = decompose(n->b);
        if (!a || !b || b->size() != 1 || (*b)[0].coeff == 0.0) return std::nullopt;
        for (auto& t : *a) {
            t.coeff /= (*b)[0].coeff;
            t.exponent -= (*b)[0].exponent;
        }
        return a;
    }
    case Kind::Pow: {
        auto a = decompose(n->a);
        if (!a || a->size() != 1) return std::nullopt;
        double c = (*a)[0].coeff, p = n->value;
        double cp;
        if (c > 0.0) cp = std::pow(c, p);
        else if (c == 0.0 && p > 0.0) cp = 0.0;
        else if (c < 0.0 && is_integer(p)) cp = std::pow(c, p);
        else return std::nullopt;
        return R(std::vector<PowerTerm>{{cp, (*a)[0].exponent * p}});
    }
    case Kind::Sqrt: {
        auto a = decompose(n->a);
        if (!a || a->size() != 1 || (*a)[0].coeff < 0.0) return std::nullopt;
        return R(std::vector<PowerTerm>{{std::sqrt((*a)[0].coeff), (*a)[0].exponent * 0.5}});
    }
    case Kind::Exp:
    case Kind::Log:
    case Kind::Abs: {
        // only constant arguments fold into a plain coefficient
        auto v = fold_node(n);
        if (!v) return std::nullopt;
        return R(std::vector<PowerTerm>{{*v, 0.0}});
    }
    }
    return std::nullopt;
}

} // namespace

std::optional<std::vector<PowerTerm>> as_power_sum(const Expression& e) {
    auto r = decompose(e.root());
    if (!r) return std::nullopt;
    std::erase_if(*r, [](const PowerTerm& t) { return t.coeff == 0.0; });
    std::sort(r->begin(), r->end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
    return r;
}

} // namespace driftgauge::expr
