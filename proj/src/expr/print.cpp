#include <charconv>
#include <cmath>

#include "pkmech/expr.hpp"

namespace pkmech {

namespace {

// Binding strength of the printed form; a child is parenthesized when its own
// level is below what the parent slot requires.
enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

std::string number(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

bool negative_coefficient(const Expr& e) {
    if (e.is_const()) return e.value() < 0.0;
    return e.kind() == Expr::Kind::Mul && e.args().front().is_const() && e.args().front().value() < 0.0;
}

std::string print(const Expr& e, int required);

std::string wrap(const std::string& s, bool parens) { return parens ? "(" + s + ")" : s; }

std::string print_product(std::span<const Expr> factors) {
    std::string sign;
    std::vector<std::string> num;
    std::vector<const Expr*> den;
    std::vector<Expr> den_storage;
    den_storage.reserve(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const Expr& f = factors[i];
        if (i == 0 && f.is_const()) {
            if (f.value() == -1.0 && factors.size() > 1) {
                sign = "-";
            } else if (f.value() < 0.0 && factors.size() > 1) {
                sign = "-";
                num.push_back(number(-f.value()));
            } else {
                num.push_back(print(f, kProduct + 1));
            }
            continue;
        }
        if (f.kind() == Expr::Kind::Pow && f.args()[1].is_const() && f.args()[1].value() < 0.0) {
            const double k = -f.args()[1].value();
            den_storage.push_back(k == 1.0 ? f.args()[0] : Expr::make_pow(f.args()[0], Expr(k)));
            den.push_back(&den_storage.back());
            continue;
        }
        num.push_back(print(f, kProduct));
    }
    std::string out = sign;
    if (num.empty()) {
        out += "1";
    } else {
        for (std::size_t i = 0; i < num.size(); ++i) {
            if (i) out += "*";
            out += num[i];
        }
    }
    if (!den.empty()) {
        out += "/";
        if (den.size() == 1) {
            out += print(*den.front(), kProduct + 1);
        } else {
            std::string d;
            for (std::size_t i = 0; i < den.size(); ++i) {
                if (i) d += "*";
                d += print(*den[i], kProduct);
            }
            out += "(" + d + ")";
        }
    }
    return out;
}

std::string print(const Expr& e, int required) {
    const auto a = e.args();
    switch (e.kind()) {
        case Expr::Kind::Const: {
            const std::string s = number(e.value());
            return wrap(s, e.value() < 0.0 && required > kSum);
        }
        case Expr::Kind::Var:
            return e.var().name();
        case Expr::Kind::Add: {
            std::string s = print(a[0], kSum);
            for (std::size_t i = 1; i < a.size(); ++i) {
                if (negative_coefficient(a[i])) {
                    s += " - " + print(-a[i], kProduct);
                } else {
                    s += " + " + print(a[i], kSum + 1);
                }
            }
            return wrap(s, required > kSum);
        }
        case Expr::Kind::Mul: {
            const std::string s = print_product(a);
            return wrap(s, required > kProduct || (required > kSum && s.front() == '-'));
        }
        case Expr::Kind::Div: {
            const std::string s = print(a[0], kProduct) + "/" + print(a[1], kProduct + 1);
            return wrap(s, required > kProduct || (required > kSum && s.front() == '-'));
        }
        case Expr::Kind::Pow: {
            std::string ex = print(a[1], kAtom);
            const std::string s = print(a[0], kAtom) + "^" + ex;
            return wrap(s, required > kPower);
        }
        case Expr::Kind::Call:
            return std::string(func_name(e.func())) + "(" + print(a[0], 0) + ")";
    }
    return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

}  // namespace pkmech
