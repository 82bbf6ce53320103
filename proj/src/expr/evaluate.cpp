#include <cmath>

#include "pkmech/expr.hpp"

namespace pkmech {

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double eval(const Expr& e, std::span<const double> p, int n) {
    const auto a = e.args();
    switch (e.kind()) {
        case Expr::Kind::Const:
            return e.value();
        case Expr::Kind::Var: {
            const Variable& v = e.var();
            if (v.index < 1 || v.index > n) throw MissingAssignment("no value for " + v.name());
            return p[v.slot(n)];
        }
        case Expr::Kind::Add: {
            double s = 0.0;
            for (const Expr& t : a) s += eval(t, p, n);
            return checked(s, "sum");
        }
        case Expr::Kind::Mul: {
            double s = 1.0;
            for (const Expr& t : a) s *= eval(t, p, n);
            return checked(s, "product");
        }
        case Expr::Kind::Div: {
            const double num = eval(a[0], p, n);
            const double den = eval(a[1], p, n);
            if (den == 0.0) throw DomainError("division by zero");
            return checked(num / den, "quotient");
        }
        case Expr::Kind::Pow: {
            const double b = eval(a[0], p, n);
            const double ex = eval(a[1], p, n);
            const bool integral = std::nearbyint(ex) == ex;
            if (b == 0.0 && ex < 0.0) throw DomainError("zero to a negative power");
            if (!integral && b < 0.0) throw DomainError("negative base to a non-integer power");
            return checked(std::pow(b, ex), "power");
        }
        case Expr::Kind::Call: {
            const double v = eval(a[0], p, n);
            switch (e.func()) {
                case Func::Sin: return std::sin(v);
                case Func::Cos: return std::cos(v);
                case Func::Exp: return checked(std::exp(v), "exp");
                case Func::Ln:
                    if (v <= 0.0) throw DomainError("ln of non-positive argument");
                    return std::log(v);
                case Func::Sinh: return checked(std::sinh(v), "sinh");
                case Func::Cosh: return checked(std::cosh(v), "cosh");
            }
        }
    }
    return 0.0;
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> point) {
    return eval(e, point, static_cast<int>(point.size() / 2));
}

}  // namespace pkmech
