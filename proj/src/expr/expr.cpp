#include "pkmech/expr.hpp"

#include <algorithm>
#include <cmath>

#include "node.hpp"

namespace pkmech {

std::string Variable::name() const {
    return (kind == CoordKind::X ? "x" : "y") + std::to_string(index);
}

std::string_view func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sinh: return "sinh";
        case Func::Cosh: return "cosh";
    }
    return "?";
}

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = value;
    node_ = std::move(n);
}

Expr::Expr(Variable v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = v;
    node_ = std::move(n);
}

Expr::Kind Expr::kind() const { return node_->kind; }
bool Expr::is_const(double value) const { return is_const() && node_->value == value; }
double Expr::value() const { return node_->value; }
const Variable& Expr::var() const { return node_->var; }
Func Expr::func() const { return node_->func; }
std::span<const Expr> Expr::args() const { return node_->args; }
bool Expr::same(const Expr& other) const { return node_ == other.node_ || compare(*this, other) == 0; }
std::string Expr::str() const { return to_string(*this); }

namespace detail {
Expr wrap(std::shared_ptr<const Node> node) { return Expr(std::move(node)); }
}  // namespace detail

namespace {

Expr make_node(Expr::Kind kind, std::vector<Expr> args, Func f = Func::Sin) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->args = std::move(args);
    n->func = f;
    return detail::wrap(std::move(n));
}

}  // namespace

Expr Expr::make_add(std::vector<Expr> terms) {
    if (terms.empty()) return Expr(0.0);
    if (terms.size() == 1) return terms.front();
    return make_node(Kind::Add, std::move(terms));
}

Expr Expr::make_mul(std::vector<Expr> factors) {
    if (factors.empty()) return Expr(1.0);
    if (factors.size() == 1) return factors.front();
    return make_node(Kind::Mul, std::move(factors));
}

Expr Expr::make_div(Expr num, Expr den) { return make_node(Kind::Div, {std::move(num), std::move(den)}); }
Expr Expr::make_pow(Expr base, Expr exponent) { return make_node(Kind::Pow, {std::move(base), std::move(exponent)}); }
Expr Expr::make_call(Func f, Expr arg) { return make_node(Kind::Call, {std::move(arg)}, f); }

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return Expr(a.value() + b.value());
    if (a.is_const(0.0)) return b;
    if (b.is_const(0.0)) return a;
    std::vector<Expr> terms;
    for (const Expr* e : {&a, &b}) {
        if (e->kind() == Expr::Kind::Add) {
            terms.insert(terms.end(), e->args().begin(), e->args().end());
        } else {
            terms.push_back(*e);
        }
    }
    return Expr::make_add(std::move(terms));
}

Expr operator-(const Expr& a) {
    if (a.is_const()) return Expr(-a.value());
    if (a.kind() == Expr::Kind::Mul && a.args().front().is_const()) {
        std::vector<Expr> f(a.args().begin(), a.args().end());
        f.front() = Expr(-f.front().value());
        if (f.front().is_const(1.0)) f.erase(f.begin());
        return Expr::make_mul(std::move(f));
    }
    return Expr::make_mul({Expr(-1.0), a});
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return Expr(a.value() * b.value());
    if (a.is_const(0.0) || b.is_const(0.0)) return Expr(0.0);
    if (a.is_const(1.0)) return b;
    if (b.is_const(1.0)) return a;
    std::vector<Expr> factors;
    double coef = 1.0;
    for (const Expr* e : {&a, &b}) {
        if (e->kind() == Expr::Kind::Mul) {
            for (const Expr& f : e->args()) {
                if (f.is_const()) {
                    coef *= f.value();
                } else {
                    factors.push_back(f);
                }
            }
        } else if (e->is_const()) {
            coef *= e->value();
        } else {
            factors.push_back(*e);
        }
    }
    if (coef == 0.0) return Expr(0.0);
    if (coef != 1.0) factors.insert(factors.begin(), Expr(coef));
    return Expr::make_mul(std::move(factors));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_const(1.0)) return a;
    if (a.is_const(0.0) && !b.is_const(0.0)) return Expr(0.0);
    if (a.is_const() && b.is_const() && b.value() != 0.0) return Expr(a.value() / b.value());
    if (b.is_const() && b.value() != 0.0) return Expr(1.0 / b.value()) * a;
    return Expr::make_div(a, b);
}

Expr pow(const Expr& base, const Expr& exponent) {
    if (exponent.is_const(0.0)) return Expr(1.0);
    if (exponent.is_const(1.0)) return base;
    if (base.is_const() && exponent.is_const()) {
        const double v = std::pow(base.value(), exponent.value());
        if (std::isfinite(v)) return Expr(v);
    }
    return Expr::make_pow(base, exponent);
}

Expr call(Func f, const Expr& arg) {
    if (arg.is_const()) {
        const double a = arg.value();
        double v = NAN;
        switch (f) {
            case Func::Sin: v = std::sin(a); break;
            case Func::Cos: v = std::cos(a); break;
            case Func::Exp: v = std::exp(a); break;
            case Func::Ln: v = a > 0.0 ? std::log(a) : NAN; break;
            case Func::Sinh: v = std::sinh(a); break;
            case Func::Cosh: v = std::cosh(a); break;
        }
        if (std::isfinite(v)) return Expr(v);
    }
    return Expr::make_call(f, arg);
}

Expr sin(const Expr& e) { return call(Func::Sin, e); }
Expr cos(const Expr& e) { return call(Func::Cos, e); }
Expr exp(const Expr& e) { return call(Func::Exp, e); }
Expr ln(const Expr& e) { return call(Func::Ln, e); }
Expr sinh(const Expr& e) { return call(Func::Sinh, e); }
Expr cosh(const Expr& e) { return call(Func::Cosh, e); }

Expr x(int index) { return Expr(Variable{CoordKind::X, index}); }
Expr y(int index) { return Expr(Variable{CoordKind::Y, index}); }

int compare(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
        case Expr::Kind::Const:
            if (a.value() == b.value()) return 0;
            return a.value() < b.value() ? -1 : 1;
        case Expr::Kind::Var: {
            const Variable& u = a.var();
            const Variable& v = b.var();
            if (u.kind != v.kind) return u.kind == CoordKind::X ? -1 : 1;
            if (u.index != v.index) return u.index < v.index ? -1 : 1;
            return 0;
        }
        case Expr::Kind::Call:
            if (a.func() != b.func()) return static_cast<int>(a.func()) < static_cast<int>(b.func()) ? -1 : 1;
            break;
        default:
            break;
    }
    const auto aa = a.args();
    const auto ba = b.args();
    const std::size_t m = std::min(aa.size(), ba.size());
    for (std::size_t i = 0; i < m; ++i) {
        if (int c = compare(aa[i], ba[i]); c != 0) return c;
    }
    if (aa.size() != ba.size()) return aa.size() < ba.size() ? -1 : 1;
    return 0;
}

int max_index(const Expr& e) {
    if (e.kind() == Expr::Kind::Var) return e.var().index;
    int m = 0;
    for (const Expr& a : e.args()) m = std::max(m, max_index(a));
    return m;
}

bool is_closed(const Expr& e) {
    if (e.kind() == Expr::Kind::Var) return false;
    return std::all_of(e.args().begin(), e.args().end(), [](const Expr& a) { return is_closed(a); });
}

}  // namespace pkmech
