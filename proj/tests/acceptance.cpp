// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pkmech/cli.hpp"
#include "pkmech/curvature.hpp"
#include "pkmech/hamilton.hpp"
#include "pkmech/integrate.hpp"
#include "pkmech/lagrange.hpp"
#include "support.hpp"

using namespace pkmech;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
};

using Vec = std::vector<double>;

Vec unit(std::size_t N, std::size_t k) {
    Vec e(N, 0.0);
    e[k] = 1.0;
    return e;
}

Vec random_vector(std::size_t N, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    Vec v(N);
    for (double& x : v) x = d(rng);
    return v;
}

double max_abs_coefficient_difference(const DifferentialForm& a, const DifferentialForm& b, int trials, std::uint64_t seed) {
    const DifferentialForm diff = (a - b).simplified();
    double worst = 0.0;
    SampleOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    opts.n = a.chart().n();
    for (const auto& [idx, c] : diff.terms()) worst = std::max(worst, max_difference_on_samples(c, Expr(0.0), opts));
    return worst;
}

// 1. Model space
void model_space(Outcome& o) {
    for (int n = 1; n <= 3; ++n) {
        const Chart c(n);
        const std::size_t N = c.dim();
        const Metric g = model_metric(c);
        const ProductStructure J = model_product_structure(c);
        bool square_is_identity = true;
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) {
                Expr s(0.0);
                for (std::size_t k = 0; k < N; ++k) s = s + J(a, k) * J(k, b);
                square_is_identity = square_is_identity && simplify(s).is_const(a == b ? 1.0 : 0.0);
            }
        }
        o.require(square_is_identity, "J^2 != Id, n=" + std::to_string(n));
        const double compat = compatibility_violation(g, J, 100, 1);
        o.require(compat < 1e-9, "compatibility " + std::to_string(compat));
        const ChristoffelSymbols gamma = christoffel(g);
        bool flat_connection = gamma.is_symbolic();
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b)
                for (std::size_t d = 0; d < N; ++d) flat_connection = flat_connection && gamma(a, b, d).is_const(0.0);
        o.require(flat_connection, "Gamma != 0, n=" + std::to_string(n));
        const CurvatureTensor R = riemann(g, gamma);
        o.require(R.is_structurally_zero(), "R != 0, n=" + std::to_string(n));
        const SpaceFormFit fit = constant_c_test(R, r_zero(g, J));
        o.require(fit.c.has_value() && *fit.c == 0.0, "c != 0, n=" + std::to_string(n));
    }
    o.detail << " n=1..3";
}

// Comparison tensor written term by term from its definition.
double r0_literal(const Matrix& g, const Matrix& J, const Vec& X, const Vec& Y, const Vec& Z, const Vec& V) {
    const std::size_t N = X.size();
    auto G = [&](const Vec& a, const Vec& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) s += g(i, j) * a[i] * b[j];
        return s;
    };
    auto Jv = [&](const Vec& a) {
        Vec r(N, 0.0);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) r[i] += J(i, j) * a[j];
        return r;
    };
    return 0.25 * (G(X, Z) * G(Y, V) - G(X, V) * G(Y, Z) - G(X, Jv(Z)) * G(Y, Jv(V)) + G(X, Jv(V)) * G(Y, Jv(Z)) -
                   2.0 * G(X, Jv(Y)) * G(Z, Jv(V)));
}

// 2. Comparison tensor
void comparison_tensor(Outcome& o) {
    const Chart c1(1);
    const Vec origin(2, 0.0);
    const Metric g1 = model_metric(c1);
    const ProductStructure J1 = model_product_structure(c1);
    const double value = r_zero(g1, J1).apply(origin, unit(2, 0), unit(2, 1), unit(2, 0), unit(2, 1));
    o.require(value == -1.0, "R0(dx1,dy1,dx1,dy1) = " + std::to_string(value));
    o.require(r0_literal(g1.evaluate(origin), J1.matrix().evaluate(origin), unit(2, 0), unit(2, 1), unit(2, 0),
                         unit(2, 1)) == value,
              "literal evaluation differs");
    double literal_gap = 0.0;
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const Chart c(n);
        const std::size_t N = c.dim();
        const Metric g = model_metric(c);
        const ProductStructure J = model_product_structure(c);
        const CurvatureTensor R0 = r_zero(g, J);
        Rng rng(200 + n);
        for (int t = 0; t < 20; ++t) {
            const Vec p = sample_point(n, rng);
            const Vec X = random_vector(N, rng), Y = random_vector(N, rng), Z = random_vector(N, rng),
                      V = random_vector(N, rng);
            literal_gap = std::max(literal_gap, std::abs(R0.apply(p, X, Y, Z, V) -
                                                         r0_literal(g.evaluate(p), J.matrix().evaluate(p), X, Y, Z, V)));
        }
        const SymmetryReport rep = symmetry_report(R0, J, 20, 17);
        worst = std::max({worst, rep.antisymmetry_first.max(), rep.antisymmetry_last.max(), rep.bianchi.max(),
                          rep.j_identity.max()});
    }
    o.require(literal_gap < 1e-9, "literal gap " + std::to_string(literal_gap));
    o.require(worst < 1e-9, "symmetry violation " + std::to_string(worst));
    o.detail << " R0=" << value << " literal_gap=" << literal_gap << " symmetry_max=" << worst;
}

double squared_norm(const Metric& g, const Vec& p, const Vec& u) {
    const Matrix gm = g.evaluate(p);
    double s = 0.0;
    for (std::size_t a = 0; a < u.size(); ++a)
        for (std::size_t b = 0; b < u.size(); ++b) s += gm(a, b) * u[a] * u[b];
    return s;
}

// 3. Constant J-sectional curvature
void space_form_converse(Outcome& o) {
    double worst_h = 0.0;
    double worst_c = 0.0;
    for (int n = 1; n <= 2; ++n) {
        const Chart c(n);
        const std::size_t N = c.dim();
        const Metric g = model_metric(c);
        const ProductStructure J = model_product_structure(c);
        const CurvatureTensor R0 = r_zero(g, J);
        for (double k : {-3.0, 0.0, 2.5}) {
            const CurvatureTensor R = R0.scaled(k);
            Rng rng(300 + n);
            int drawn = 0;
            while (drawn < 20) {
                const Vec p = sample_point(n, rng);
                const Vec u = random_vector(N, rng);
                if (std::abs(squared_norm(g, p, u)) < 0.05) continue;
                ++drawn;
                worst_h = std::max(worst_h, std::abs(j_sectional_curvature(R, g, J, u, p) - k));
            }
            const SpaceFormFit fit = constant_c_test(R, R0, 10, 5);
            o.require(fit.c.has_value(), "no constant fitted for c=" + std::to_string(k));
            if (fit.c) worst_c = std::max(worst_c, std::abs(*fit.c - k));
        }
    }
    o.require(worst_h <= 1e-9, "J-sectional error " + std::to_string(worst_h));
    o.require(worst_c <= 1e-9, "fitted c error " + std::to_string(worst_c));
    o.detail << " max|H-c|=" << worst_h << " max|c_fit-c|=" << worst_c;
}

// 4. Vertical derivative as a bracket
void vertical_bracket(Outcome& o) {
    double worst = 0.0;
    for (int n = 1; n <= 2; ++n) {
        const Chart c(n);
        const ProductStructure J = model_product_structure(c);
        Rng rng(400 + n);
        for (int i = 0; i < 50; ++i) {
            const Expr f = test::random_polynomial(c, 4, rng);
            const DifferentialForm F = DifferentialForm::scalar(c, f);
            const DifferentialForm bracket =
                insertion_operator(J, exterior_derivative(F)) - exterior_derivative(insertion_operator(J, F));
            worst = std::max(worst, max_abs_coefficient_difference(bracket, vertical_derivative(f, c), 20, i));
        }
    }
    o.require(worst < 1e-9, "coefficient gap " + std::to_string(worst));
    o.detail << " 2x50 polynomials, max gap=" << worst;
}

// 5. L = x1*y1
void lagrangian_xy(Outcome& o) {
    const Chart c(1);
    const LagrangianSystem L(c, parse("x1*y1", c));
    const DifferentialForm phi = kahler_form(L).simplified();
    const bool phi_ok = phi.terms().size() == 1 && simplify(phi.coefficient({0, 1})).is_const(2.0);
    o.require(phi_ok, "Phi_L = " + phi.str());
    const auto el = euler_lagrange_system(L);
    const VectorField xi = el.semispray.field();
    o.require(equal_on_samples(xi[0], parse("-x1", c)) && equal_on_samples(xi[1], parse("y1", c)),
              "semispray " + xi.str());
    const Expr E = energy(L, el.semispray);
    o.require(equal_on_samples(E, parse("-3*x1*y1", c)), "E_L = " + E.str());
    // dE_L differentiates with the semispray components X, Y held constant.
    const DifferentialForm i_xi_phi = interior_product(xi, kahler_form(L));
    const double gap = max_abs_coefficient_difference(i_xi_phi, energy_differential(L, el.semispray), 100, 5);
    o.require(gap < 1e-9, "i_xi Phi - dE = " + std::to_string(gap));
    const double substituted_gap =
        max_abs_coefficient_difference(i_xi_phi, exterior_derivative(DifferentialForm::scalar(c, E)), 100, 5);

    const Vec s0{1.0, 1.0};
    const Trajectory tr = integrate_rk4(el.odes, s0, 0.0, 5.0, 1e-3);
    double rel = 0.0;
    for (std::size_t k = 0; k < tr.rows(); ++k) {
        const double t = tr.time(k);
        rel = std::max({rel, std::abs(tr.row(k)[0] / std::exp(-t) - 1.0), std::abs(tr.row(k)[1] / std::exp(t) - 1.0)});
    }
    o.require(rel < 1e-6, "trajectory error " + std::to_string(rel));
    const double drift = conservation_report(tr, E).max_relative_drift;
    o.require(drift < 1e-8, "E_L drift " + std::to_string(drift));
    o.detail << " Phi_L=" << phi.str() << " xi=" << xi.str() << " E_L=" << E.str() << " gap=" << gap
             << " (d of substituted E_L: " << substituted_gap << ") rel_err=" << rel
             << " drift=" << drift;
}

// 6. Exponential law
Expr regular_lagrangian(const Chart& c, Rng& rng) {
    Expr base(0.0);
    for (int i = 1; i <= c.n(); ++i) base = base + x(i) * y(i);
    return base + Expr(0.05) * test::random_polynomial(c, 3, rng, 4);
}

bool regular_along(const LagrangianSystem& L, const Trajectory& tr) {
    const Expr det = determinant(L.hessian());
    for (std::size_t k = 0; k < tr.rows(); ++k) {
        if (std::abs(evaluate(det, tr.row(k))) < 0.1) return false;
    }
    return true;
}

void exponential_law(Outcome& o) {
    double worst = 0.0;
    int accepted = 0;
    int rejected = 0;
    for (int n = 1; n <= 2; ++n) {
        const Chart c(n);
        Rng rng(600 + n);
        int here = 0;
        for (int attempt = 0; attempt < 40 && here < 5; ++attempt) {
            const LagrangianSystem L(c, regular_lagrangian(c, rng));
            const auto el = euler_lagrange_system(L);
            const Vec s0 = random_vector(c.dim(), rng, -0.3, 0.3);
            const Trajectory tr = integrate_rk4(el.odes, s0, 0.0, 3.0, 1e-3);
            if (!regular_along(L, tr)) {
                ++rejected;
                continue;
            }
            ++here;
            worst = std::max(worst, exponential_law_report(L, tr).max());
        }
        accepted += here;
    }
    o.require(accepted == 10, "only " + std::to_string(accepted) + " regular Lagrangians");
    o.require(worst < 1e-5, "relative drift " + std::to_string(worst));
    o.detail << " " << accepted << " Lagrangians (" << rejected << " singular along path skipped), max drift=" << worst;
}

// 7. Hamiltonian side
void hamiltonian_xy(Outcome& o) {
    const Chart c(1);
    const HamiltonianSystem H(c, parse("x1*y1", c));
    const VectorField Z = hamiltonian_vector_field(H);
    o.require(equal_on_samples(Z[0], parse("x1", c)) && equal_on_samples(Z[1], parse("-y1", c)), "Z_H = " + Z.str());

    double worst = 0.0;
    for (int n = 1; n <= 2; ++n) {
        const Chart cn(n);
        const DifferentialForm phi = canonical_form(cn);
        Rng rng(700 + n);
        for (int i = 0; i < 50; ++i) {
            const HamiltonianSystem Hr(cn, test::random_polynomial(cn, 4, rng, 6));
            const DifferentialForm dH = exterior_derivative(DifferentialForm::scalar(cn, Hr.hamiltonian()));
            worst = std::max(worst, max_abs_coefficient_difference(
                                        interior_product(hamiltonian_vector_field(Hr), phi), dH, 20, i));
        }
    }
    o.require(worst < 1e-9, "i_Z Phi - dH = " + std::to_string(worst));

    const Vec s0{1.5, -0.5};
    const Trajectory tr = integrate_symplectic_euler(H, s0, 0.0, 1.0, 0.01);
    double step_ulps = 0.0;
    for (std::size_t k = 1; k < tr.rows(); ++k) {
        const double before = tr.row(k - 1)[0] * tr.row(k - 1)[1];
        const double after = tr.row(k)[0] * tr.row(k)[1];
        step_ulps = std::max(step_ulps, std::abs(after - before) / (std::abs(before) * 2.220446049250313e-16));
    }
    o.require(step_ulps <= 4.0, "x*y changes by " + std::to_string(step_ulps) + " ulp per step");

    const Vec p{0.5, 0.5};
    const double symp = symplecticity_check(H, Scheme::SymplecticEuler, p, 0.01, 100);
    o.require(symp < 1e-4, "symplecticity " + std::to_string(symp));
    o.detail << " Z_H=" << Z.str() << " residual=" << worst << " x*y step change<=" << step_ulps
             << "ulp symplecticity=" << symp;
}

// 8. RK4 order
void rk4_order(Outcome& o) {
    const Chart c(1);
    const ODESystem decay = ODESystem::symbolic(c, {-x(1), Expr(0.0)});
    auto error = [&](double h) {
        const Vec s0{1.0, 0.0};
        return std::abs(integrate_rk4(decay, s0, 0.0, 1.0, h).back()[0] - std::exp(-1.0));
    };
    const double ratio = error(1e-2) / error(5e-3);
    o.require(ratio >= 14.0 && ratio <= 18.0, "ratio " + std::to_string(ratio));
    o.detail << " ratio=" << ratio;
}

// 9. Degenerate inputs
void degeneracy(Outcome& o) {
    const Chart c(1);
    bool threw = false;
    try {
        euler_lagrange_system(LagrangianSystem(c, parse("x1", c)));
    } catch (const DegenerateLagrangian&) {
        threw = true;
    }
    o.require(threw, "L = x1 accepted");

    cli::ProblemFile p;
    p.n = 1;
    p.kind = "lagrangian";
    p.function = "0.5*(x1^2 + y1^2)";
    const cli::Report rep = cli::cmd_derive(p);
    o.require(rep.exit_code == cli::kExitOk, "derive exit " + std::to_string(rep.exit_code));
    o.require(rep.json.value("form_is_zero", false), "Phi_L = 0 not flagged");

    const Chart c2(2);
    bool plane = false;
    try {
        sectional_curvature(riemann(model_metric(c2)), model_metric(c2), {Vec(4, 0.0), unit(4, 0), unit(4, 1)});
    } catch (const DegeneratePlane&) {
        plane = true;
    }
    o.require(plane, "span{d/dx1, d/dx2} accepted");
    o.detail << " DegenerateLagrangian, form_is_zero, DegeneratePlane";
}

// 10. CLI goldens
std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void cli_goldens(Outcome& o) {
    const fs::path golden = PKMECH_GOLDEN_DIR;
    const fs::path problems = PKMECH_PROBLEMS_DIR;
    const fs::path work = fs::temp_directory_path() / "pkmech_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    std::ifstream manifest(golden / "manifest.txt");
    std::string line;
    int compared = 0;
    while (std::getline(manifest, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string problem, command;
        int expected = 0;
        fields >> problem >> command >> expected;
        const std::string tag = problem + "." + command;
        const fs::path out = work / tag;
        const fs::path stdout_file = work / (tag + ".stdout");
        const std::string cmd = "cd '" + work.string() + "' && '" PKMECH_TOOL "' " + command + " --problem '" +
                                (problems / (problem + ".json")).string() + "' --out '" + out.string() +
                                "' --format json > '" + stdout_file.string() + "' 2>/dev/null";
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        o.require(code == expected, tag + " exit " + std::to_string(code));
        const std::string got = slurp(stdout_file);
        o.require(got == slurp(golden / (tag + ".json")), tag + " differs from golden");
        if (code == 0) o.require(slurp(out / (command + ".json")) == got, tag + " report file differs from stdout");
        ++compared;
    }
    o.require(compared > 0, "empty manifest");
    o.detail << " " << compared << " reports compared";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"model space: J^2 = Id, compatibility, Gamma = R = 0, c = 0", model_space},
        {"comparison tensor value, literal oracle and symmetries", comparison_tensor},
        {"J-sectional curvature and fitted c for c*R0", space_form_converse},
        {"d_J f equals [i_J, d] f", vertical_bracket},
        {"L = x1*y1 pipeline", lagrangian_xy},
        {"exponential law along trajectories", exponential_law},
        {"H = x1*y1 pipeline and symplectic Euler", hamiltonian_xy},
        {"RK4 convergence ratio", rk4_order},
        {"degenerate inputs", degeneracy},
        {"CLI reports match goldens", cli_goldens},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        if (!o.pass) ++failures;
        std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << " |"
                  << o.detail.str() << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
