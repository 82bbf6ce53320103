#include <cmath>

#include "doctest.h"
#include "pkmech/integrate.hpp"
#include "pkmech/lagrange.hpp"
#include "support.hpp"

using namespace pkmech;
using test::forms_equal;

namespace {

LagrangianSystem lagrangian(const char* src, int n = 1) {
    const Chart c(n);
    return LagrangianSystem(c, parse(src, c));
}

// The Hessian expansion of the Lagrangian 2-form, summed literally over all (i, j).
DifferentialForm expanded_kahler_form(const LagrangianSystem& L) {
    const Chart& c = L.chart();
    const int n = c.n();
    const Expr& f = L.lagrangian();
    DifferentialForm out(c, 2);
    auto d = [&](const Expr& e, std::size_t s) { return differentiate(e, c.coordinate(s)); };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto xj = static_cast<std::size_t>(j), xi = static_cast<std::size_t>(i);
            const auto yj = static_cast<std::size_t>(n + j), yi = static_cast<std::size_t>(n + i);
            const auto bx = [&](std::size_t s) { return DifferentialForm::basis(c, s); };
            out = out - wedge(bx(xj), bx(xi)).scaled(d(d(f, xi), xj));
            out = out - wedge(bx(yj), bx(xi)).scaled(d(d(f, xi), yj));
            out = out + wedge(bx(xj), bx(yi)).scaled(d(d(f, yi), xj));
            out = out + wedge(bx(yj), bx(yi)).scaled(d(d(f, yi), yj));
        }
    }
    return out;
}

// Sum x_i y_i plus a small random cubic: regular near the origin.
Expr regular_lagrangian(const Chart& c, Rng& rng) {
    Expr base(0.0);
    for (int i = 1; i <= c.n(); ++i) base = base + x(i) * y(i);
    return base + Expr(0.05) * test::random_polynomial(c, 3, rng, 4);
}

std::vector<double> small_state(const Chart& c, Rng& rng) {
    std::uniform_real_distribution<double> d(-0.3, 0.3);
    std::vector<double> s(c.dim());
    for (double& v : s) v = d(rng);
    return s;
}

// Regularity along the path: the Hessian determinant stays away from zero.
bool regular_along(const LagrangianSystem& L, const Trajectory& tr) {
    const Expr det = determinant(L.hessian());
    for (std::size_t k = 0; k < tr.rows(); ++k) {
        if (std::abs(evaluate(det, tr.row(k))) < 0.1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("Lagrangian 2-form examples") {
    const auto L = lagrangian("x1*y1");
    const DifferentialForm phi = kahler_form(L);
    CHECK(phi.str() == "2 · dx1^dy1");
    CHECK(kahler_form(lagrangian("0.5*(x1^2 + y1^2)")).simplified().is_structurally_zero());
    CHECK(kahler_form(lagrangian("3")).simplified().is_structurally_zero());
}

TEST_CASE("Lagrangian 2-form equals its Hessian expansion and is closed") {
    for (int n = 1; n <= 2; ++n) {
        const Chart c(n);
        Rng rng(60 + n);
        for (int i = 0; i < 50; ++i) {
            const LagrangianSystem L(c, test::random_polynomial(c, 4, rng, 6));
            const DifferentialForm phi = kahler_form(L);
            CHECK(forms_equal(phi, expanded_kahler_form(L), 30, i));
            if (n == 2) CHECK(forms_equal(exterior_derivative(phi), DifferentialForm(c, 3), 30, i));
        }
    }
}

TEST_CASE("energy examples") {
    const Chart c(1);
    const auto L = lagrangian("x1*y1");
    CHECK(to_string(energy(L, Semispray(c, {-x(1), y(1)}))) == "-3*x1*y1");
    CHECK(to_string(energy(L, Semispray(c, {Expr(0.0), Expr(0.0)}))) == "-x1*y1");
    const auto L2 = lagrangian("0.5*(x1^2 + y1^2)");
    CHECK(equal_on_samples(energy(L2, Semispray(c, {x(1), -y(1)})), parse("0.5*(x1^2 + y1^2)", c)));
    const double p[] = {0.5, 2.0};
    CHECK(energy_at(L, Semispray(c, {-x(1), y(1)}), p) == doctest::Approx(-3.0));
}

TEST_CASE("Liouville field") {
    const Chart c(1);
    const ProductStructure J = model_product_structure(c);
    const VectorField V = liouville_field(Semispray(c, {-x(1), y(1)}), J).simplified();
    CHECK(V.str() == "-x1 · d/dx1 - y1 · d/dy1");
    const VectorField twice = j_apply(J, V).simplified();
    CHECK(twice.str() == "-x1 · d/dx1 + y1 · d/dy1");
    CHECK(liouville_field(Semispray(c, {Expr(1.0), Expr(0.0)}), J).simplified().str() == "1 · d/dx1");
}

TEST_CASE("energy differential examples") {
    const Chart c(1);
    const auto L = lagrangian("x1*y1");
    const DifferentialForm dE = energy_differential(L, Semispray(c, {-x(1), y(1)}));
    CHECK(equal_on_samples(dE.coefficient({0}), parse("-2*y1", c)));
    CHECK(equal_on_samples(dE.coefficient({1}), parse("-2*x1", c)));
    const DifferentialForm dE0 = energy_differential(L, Semispray(c, {Expr(0.0), Expr(0.0)}));
    CHECK(equal_on_samples(dE0.coefficient({0}), -y(1)));
    CHECK(equal_on_samples(dE0.coefficient({1}), -x(1)));
}

TEST_CASE("semispray solve examples") {
    const Semispray a = solve_semispray(lagrangian("x1*y1"));
    REQUIRE(a.is_symbolic());
    CHECK(a.field().str() == "-x1 · d/dx1 + y1 · d/dy1");
    const Semispray b = solve_semispray(lagrangian("0.5*(x1^2 + y1^2)"));
    CHECK(b.field().str() == "x1 · d/dx1 - y1 · d/dy1");
    try {
        solve_semispray(lagrangian("x1"));
        FAIL("expected degenerate Lagrangian");
    } catch (const DegenerateLagrangian& e) {
        CHECK(e.rank() == 0);
        CHECK(e.dim() == 2);
        CHECK(std::string(e.what()).find("rank 0") != std::string::npos);
    }
    // Rank-deficient but not zero: L depends on x1*y1 only through x1.
    CHECK_THROWS_AS(solve_semispray(lagrangian("x1*y1 + x2^2", 2)), DegenerateLagrangian);
}

TEST_CASE("Euler-Lagrange system examples") {
    const auto el = euler_lagrange_system(lagrangian("x1*y1"));
    CHECK(to_string(el.odes.rhs()[0]) == "-x1");
    CHECK(to_string(el.odes.rhs()[1]) == "y1");
    CHECK(el.odes.provenance() == ODESystem::Provenance::EulerLagrange);
    for (const Expr& r : el.residuals) CHECK(equal_on_samples(r, Expr(0.0)));
    const auto el2 = euler_lagrange_system(lagrangian("0.5*(x1^2 + y1^2)"));
    CHECK(to_string(el2.odes.rhs()[0]) == "x1");
    CHECK(to_string(el2.odes.rhs()[1]) == "-y1");
    CHECK_FALSE(satisfies_velocity_condition(el.semispray));
    CHECK(satisfies_velocity_condition(Semispray(Chart(1), {y(1), Expr(0.0)})));
}

TEST_CASE("semispray identities for random regular Lagrangians") {
    for (int n = 1; n <= 2; ++n) {
        const Chart c(n);
        Rng rng(70 + n);
        for (int i = 0; i < 10; ++i) {
            const LagrangianSystem L(c, regular_lagrangian(c, rng));
            const EulerLagrangeSystem el = euler_lagrange_system(L);
            REQUIRE(el.semispray.is_symbolic());
            SampleOptions o;
            o.trials = 30;
            o.seed = static_cast<std::uint64_t>(i);
            o.n = n;
            for (const Expr& r : el.residuals) CHECK(equal_on_samples(r, Expr(0.0), o));
            const DifferentialForm lhs = interior_product(el.semispray.field(), kahler_form(L));
            const DifferentialForm rhs = energy_differential(L, el.semispray);
            CHECK(forms_equal(lhs, rhs, 30, i));
        }
    }
}

TEST_CASE("pointwise semispray above the symbolic limit") {
    const Chart c(3);
    Rng rng(5);
    const LagrangianSystem L(c, regular_lagrangian(c, rng));
    const EulerLagrangeSystem el = euler_lagrange_system(L);
    REQUIRE_FALSE(el.semispray.is_symbolic());
    CHECK_FALSE(el.odes.is_symbolic());
    CHECK(el.residuals.empty());
    for (int t = 0; t < 10; ++t) {
        const auto p = small_state(c, rng);
        for (double r : el.residuals_at(L, p)) CHECK(std::abs(r) < 1e-10);
        const auto rates = el.odes.rates(p);
        const auto v = el.semispray.evaluate(p);
        for (std::size_t k = 0; k < v.size(); ++k) CHECK(rates[k] == v[k]);
    }
    // The same system solved symbolically agrees with the pointwise one.
    SolveOptions wide;
    wide.symbolic_limit = 6;
    const LagrangianSystem Lsmall(c, x(1) * y(1) + x(2) * y(2) + x(3) * y(3) + Expr(0.1) * x(1) * y(2) * y(2));
    const Semispray sym = solve_semispray(Lsmall, wide);
    const Semispray num = solve_semispray(Lsmall);
    REQUIRE(sym.is_symbolic());
    const auto p = small_state(c, rng);
    const auto a = sym.evaluate(p);
    const auto b = num.evaluate(p);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
}

TEST_CASE("x1*y1 trajectory, energy and exponential laws") {
    const auto L = lagrangian("x1*y1");
    const auto el = euler_lagrange_system(L);
    const std::vector<double> s0{1.0, 1.0};
    const Trajectory tr = integrate_rk4(el.odes, s0, 0.0, 5.0, 1e-3);
    CHECK(tr.back()[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-6));
    CHECK(tr.back()[1] == doctest::Approx(std::exp(5.0)).epsilon(1e-6));
    CHECK(conservation_report(tr, energy(L, el.semispray)).max_relative_drift < 1e-8);
    CHECK(exponential_law_report(L, tr).max() < 1e-5);
}

TEST_CASE("exponential laws and conserved products for random regular Lagrangians") {
    for (int n = 1; n <= 2; ++n) {
        const Chart c(n);
        Rng rng(80 + n);
        int accepted = 0;
        for (int attempt = 0; attempt < 40 && accepted < 5; ++attempt) {
            const LagrangianSystem L(c, regular_lagrangian(c, rng));
            const auto el = euler_lagrange_system(L);
            const auto s0 = small_state(c, rng);
            const Trajectory tr = integrate_rk4(el.odes, s0, 0.0, 3.0, 1e-3);
            if (!regular_along(L, tr)) continue;
            ++accepted;
            const auto law = exponential_law_report(L, tr);
            CHECK(law.max() < 1e-5);
            const auto n_ = static_cast<std::size_t>(n);
            for (std::size_t j = 0; j < n_; ++j) {
                for (std::size_t k = 0; k < n_; ++k) {
                    const Expr product = L.gradient(j) * L.gradient(n_ + k);
                    if (std::abs(evaluate(product, s0)) < 1e-6) continue;
                    CHECK(conservation_report(tr, product).max_relative_drift < 1e-6);
                }
            }
        }
        CHECK(accepted == 5);
    }
}

TEST_CASE("momentum residual families") {
    const auto L = lagrangian("x1*y1");
    const double h = 1e-3;
    Trajectory exact(0.0, h, 2);
    for (int k = 0; k <= 1000; ++k) {
        const double t = k * h;
        const double row[] = {std::exp(-t), std::exp(t)};
        exact.push(row);
    }
    const auto rep = proposition1_report(L, exact);
    CHECK(rep.x_family[0] < 1e-5);
    CHECK(rep.y_family[0] < 1e-5);

    Trajectory constant(0.0, h, 2);
    for (int k = 0; k < 5; ++k) {
        const double row[] = {1.0, 2.0};
        constant.push(row);
    }
    CHECK(proposition1_report(L, constant).max() > 1.0);

    const auto L2 = lagrangian("0.5*(x1^2 + y1^2)");
    const auto el2 = euler_lagrange_system(L2);
    const std::vector<double> s0{0.5, -0.5};
    CHECK(proposition1_report(L2, integrate_rk4(el2.odes, s0, 0.0, 1.0, h)).max() < 1e-5);

    Trajectory short_tr(0.0, h, 2);
    short_tr.push(s0);
    CHECK_THROWS(proposition1_report(L, short_tr));
}

TEST_CASE("energy of the degenerate-form Lagrangian is not conserved") {
    const auto L = lagrangian("0.5*(x1^2 + y1^2)");
    const auto el = euler_lagrange_system(L);
    const Expr rate = simplify(el.semispray.field().apply(energy(L, el.semispray)));
    CHECK_FALSE(equal_on_samples(rate, Expr(0.0)));
}
