#ifndef PKMECH_TESTS_SUPPORT_HPP
#define PKMECH_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <vector>

#include "pkmech/expr.hpp"
#include "pkmech/geometry.hpp"
#include "pkmech/sampling.hpp"

namespace pkmech::test {

inline Expr random_variable(const Chart& chart, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, chart.dim() - 1);
    return chart.coordinate_expr(pick(rng));
}

/// Sum of a few monomials of total degree <= degree with small integer
/// coefficients.
inline Expr random_polynomial(const Chart& chart, int degree, Rng& rng, int terms = 5) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> deg(0, degree);
    Expr out(0.0);
    for (int t = 0; t < terms; ++t) {
        int c = coef(rng);
        if (c == 0) c = 1;
        Expr mono(static_cast<double>(c));
        const int d = deg(rng);
        for (int k = 0; k < d; ++k) mono = mono * random_variable(chart, rng);
        out = out + mono;
    }
    return out;
}

/// Random smooth expression tree, defined everywhere on the sample box.
inline Expr random_expression(const Chart& chart, int depth, Rng& rng) {
    std::uniform_int_distribution<int> op(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    switch (op(rng)) {
        case 0: {
            const double c = std::round(val(rng) * 4.0) / 4.0;
            return Expr(c == 0.0 ? 0.5 : c);
        }
        case 1: return random_variable(chart, rng);
        case 2: return random_expression(chart, depth - 1, rng) + random_expression(chart, depth - 1, rng);
        case 3: return random_expression(chart, depth - 1, rng) - random_expression(chart, depth - 1, rng);
        case 4: return random_expression(chart, depth - 1, rng) * random_expression(chart, depth - 1, rng);
        case 5: {
            const Expr d = random_expression(chart, depth - 1, rng);
            return random_expression(chart, depth - 1, rng) / (Expr(1.0) + d * d);
        }
        case 6: {
            std::uniform_int_distribution<int> k(-2, 3);
            const double e = k(rng);
            const Expr b = random_expression(chart, depth - 1, rng);
            // Negative powers only of bases bounded away from zero.
            return e < 0 ? pow(Expr(1.0) + b * b, Expr(e)) : pow(b, Expr(e));
        }
        case 7: return sin(random_expression(chart, depth - 1, rng));
        case 8: return cos(random_expression(chart, depth - 1, rng));
        default: {
            const Expr a = random_expression(chart, depth - 1, rng);
            return ln(Expr(1.0) + a * a);
        }
    }
}

/// Central difference of e along slot at point.
inline double central_difference(const Expr& e, std::vector<double> point, std::size_t slot, double step = 1e-5) {
    const double p0 = point[slot];
    point[slot] = p0 + step;
    const double fp = evaluate(e, point);
    point[slot] = p0 - step;
    const double fm = evaluate(e, point);
    return (fp - fm) / (2.0 * step);
}

inline bool forms_equal(const DifferentialForm& a, const DifferentialForm& b, int trials = 100, std::uint64_t seed = 0) {
    const DifferentialForm diff = (a - b).simplified();
    for (const auto& [idx, c] : diff.terms()) {
        if (!equal_on_samples(c, Expr(0.0), trials, seed)) return false;
    }
    return true;
}

}  // namespace pkmech::test

#endif  // PKMECH_TESTS_SUPPORT_HPP
