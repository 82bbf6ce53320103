#include "pkmech/expr.hpp"

namespace pkmech {

Expr differentiate(const Expr& e, const Variable& v) {
    const auto a = e.args();
    switch (e.kind()) {
        case Expr::Kind::Const:
            return Expr(0.0);
        case Expr::Kind::Var:
            return Expr(e.var() == v ? 1.0 : 0.0);
        case Expr::Kind::Add: {
            Expr sum(0.0);
            for (const Expr& t : a) sum = sum + differentiate(t, v);
            return sum;
        }
        case Expr::Kind::Mul: {
            Expr sum(0.0);
            for (std::size_t i = 0; i < a.size(); ++i) {
                Expr d = differentiate(a[i], v);
                if (d.is_const(0.0)) continue;
                Expr term = d;
                for (std::size_t j = 0; j < a.size(); ++j) {
                    if (j != i) term = term * a[j];
                }
                sum = sum + term;
            }
            return sum;
        }
        case Expr::Kind::Div: {
            const Expr& num = a[0];
            const Expr& den = a[1];
            Expr dn = differentiate(num, v);
            Expr dd = differentiate(den, v);
            if (dd.is_const(0.0)) return dn / den;
            return (dn * den - num * dd) / pow(den, Expr(2.0));
        }
        case Expr::Kind::Pow: {
            const Expr& base = a[0];
            const Expr& ex = a[1];
            Expr db = differentiate(base, v);
            if (is_closed(ex)) {
                if (db.is_const(0.0)) return Expr(0.0);
                return ex * pow(base, ex - Expr(1.0)) * db;
            }
            // b^e = exp(e ln b)
            Expr de = differentiate(ex, v);
            return e * (de * ln(base) + ex * db / base);
        }
        case Expr::Kind::Call: {
            const Expr& arg = a[0];
            Expr da = differentiate(arg, v);
            if (da.is_const(0.0)) return Expr(0.0);
            switch (e.func()) {
                case Func::Sin: return cos(arg) * da;
                case Func::Cos: return -(sin(arg) * da);
                case Func::Exp: return e * da;
                case Func::Ln: return da / arg;
                case Func::Sinh: return cosh(arg) * da;
                case Func::Cosh: return sinh(arg) * da;
            }
        }
    }
    return Expr(0.0);
}

}  // namespace pkmech
