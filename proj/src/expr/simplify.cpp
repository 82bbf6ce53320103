#include <algorithm>
#include <cmath>
#include <map>

#include "pkmech/expr.hpp"

namespace pkmech {

namespace {

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

bool is_integer(double v) { return std::nearbyint(v) == v; }

Expr collect_product(std::span<const Expr> factors);

// Split a term into numeric coefficient and the remaining product.
std::pair<double, Expr> split_coefficient(const Expr& t) {
    if (t.is_const()) return {t.value(), Expr(1.0)};
    if (t.kind() == Expr::Kind::Mul && t.args().front().is_const()) {
        const auto f = t.args();
        std::vector<Expr> rest(f.begin() + 1, f.end());
        return {f.front().value(), Expr::make_mul(std::move(rest))};
    }
    return {1.0, t};
}

Expr with_coefficient(double c, const Expr& rest) {
    if (rest.is_const()) return Expr(c * rest.value());
    if (c == 1.0) return rest;
    std::vector<Expr> f{Expr(c)};
    if (rest.kind() == Expr::Kind::Mul) {
        f.insert(f.end(), rest.args().begin(), rest.args().end());
    } else {
        f.push_back(rest);
    }
    return Expr::make_mul(std::move(f));
}

Expr collect_sum(std::span<const Expr> terms) {
    std::map<Expr, double, ExprLess> groups;
    double constant = 0.0;
    // Numeric coefficients distribute over nested sums.
    auto add_term = [&](auto&& self, const Expr& t, double scale) -> void {
        if (t.kind() == Expr::Kind::Add) {
            for (const Expr& u : t.args()) self(self, u, scale);
            return;
        }
        auto [c, rest] = split_coefficient(t);
        if (rest.is_const()) {
            constant += scale * c * rest.value();
        } else if (rest.kind() == Expr::Kind::Add) {
            self(self, rest, scale * c);
        } else {
            groups[rest] += scale * c;
        }
    };
    for (const Expr& t : terms) add_term(add_term, t, 1.0);
    std::vector<Expr> out;
    for (const auto& [rest, c] : groups) {
        if (c != 0.0) out.push_back(with_coefficient(c, rest));
    }
    if (constant != 0.0) out.emplace_back(constant);
    return Expr::make_add(std::move(out));
}

Expr simplify_pow(const Expr& base, const Expr& ex) {
    if (!ex.is_const()) return Expr::make_pow(base, ex);
    const double k = ex.value();
    if (k == 0.0) return Expr(1.0);
    if (k == 1.0) return base;
    if (base.is_const()) {
        const double v = std::pow(base.value(), k);
        if (std::isfinite(v) && (is_integer(k) || base.value() > 0.0)) return Expr(v);
        return Expr::make_pow(base, ex);
    }
    if (is_integer(k)) {
        if (base.kind() == Expr::Kind::Pow && base.args()[1].is_const()) {
            return simplify_pow(base.args()[0], Expr(base.args()[1].value() * k));
        }
        if (base.kind() == Expr::Kind::Mul) {
            std::vector<Expr> f;
            for (const Expr& b : base.args()) f.push_back(simplify_pow(b, ex));
            return collect_product(f);
        }
    }
    return Expr::make_pow(base, ex);
}

Expr collect_product(std::span<const Expr> factors) {
    std::map<Expr, double, ExprLess> groups;
    std::vector<Expr> opaque;  // non-constant exponents
    double coef = 1.0;
    auto add_factor = [&](const Expr& f) {
        if (f.is_const()) {
            coef *= f.value();
        } else if (f.kind() == Expr::Kind::Pow && f.args()[1].is_const()) {
            groups[f.args()[0]] += f.args()[1].value();
        } else if (f.kind() == Expr::Kind::Pow) {
            opaque.push_back(f);
        } else {
            groups[f] += 1.0;
        }
    };
    for (const Expr& f : factors) {
        if (f.kind() == Expr::Kind::Mul) {
            for (const Expr& g : f.args()) add_factor(g);
        } else {
            add_factor(f);
        }
    }
    if (coef == 0.0) return Expr(0.0);
    std::vector<Expr> out;
    for (const auto& [base, k] : groups) {
        Expr p = simplify_pow(base, Expr(k));
        if (p.is_const()) {
            coef *= p.value();
        } else if (p.kind() == Expr::Kind::Mul) {
            for (const Expr& g : p.args()) {
                if (g.is_const()) {
                    coef *= g.value();
                } else {
                    out.push_back(g);
                }
            }
        } else {
            out.push_back(p);
        }
    }
    out.insert(out.end(), opaque.begin(), opaque.end());
    std::sort(out.begin(), out.end(), ExprLess{});
    if (coef == 0.0) return Expr(0.0);
    if (out.empty()) return Expr(coef);
    if (coef != 1.0) out.insert(out.begin(), Expr(coef));
    return Expr::make_mul(std::move(out));
}

Expr simplify_call(Func f, const Expr& arg) {
    if (f == Func::Ln && arg.kind() == Expr::Kind::Call && arg.func() == Func::Exp) return arg.args()[0];
    if (arg.is_const(0.0)) {
        switch (f) {
            case Func::Sin:
            case Func::Sinh: return Expr(0.0);
            case Func::Cos:
            case Func::Cosh:
            case Func::Exp: return Expr(1.0);
            case Func::Ln: break;
        }
    }
    return call(f, arg);
}

}  // namespace

Expr simplify(const Expr& e) {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const Expr& a : e.args()) args.push_back(simplify(a));
    switch (e.kind()) {
        case Expr::Kind::Const:
        case Expr::Kind::Var:
            return e;
        case Expr::Kind::Add:
            return collect_sum(args);
        case Expr::Kind::Mul:
            return collect_product(args);
        case Expr::Kind::Div: {
            if (args[1].is_const(0.0)) return Expr::make_div(args[0], args[1]);  // keep the pole
            const Expr inv = simplify_pow(args[1], Expr(-1.0));
            const Expr both[] = {args[0], inv};
            return collect_product(both);
        }
        case Expr::Kind::Pow:
            return simplify_pow(args[0], args[1]);
        case Expr::Kind::Call:
            return simplify_call(e.func(), args[0]);
    }
    return e;
}

}  // namespace pkmech
