#include "pkmech/lagrange.hpp"

#include <algorithm>
#include <cmath>

#include "pkmech/sampling.hpp"

namespace pkmech {

DegenerateLagrangian::DegenerateLagrangian(int rank, int dim)
    : std::runtime_error("degenerate Lagrangian: the semispray system (Hessian of L) has rank " +
                         std::to_string(rank) + " < " + std::to_string(dim)),
      rank_(rank),
      dim_(dim) {}

LagrangianSystem::LagrangianSystem(Chart chart, Expr lagrangian) : chart_(chart), L_(std::move(lagrangian)) {
    if (max_index(L_) > chart_.n()) {
        throw DimensionMismatch("Lagrangian uses coordinates beyond n = " + std::to_string(chart_.n()));
    }
    const std::size_t N = chart_.dim();
    grad_.reserve(N);
    for (std::size_t a = 0; a < N; ++a) grad_.push_back(simplify(differentiate(L_, chart_.coordinate(a))));
    hess_ = ExprMatrix(N, N);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = a; b < N; ++b) {
            Expr h = simplify(differentiate(grad_[a], chart_.coordinate(b)));
            hess_(a, b) = h;
            hess_(b, a) = h;
        }
    }
}

// ---------------------------------------------------------------------------
// Semispray

Semispray::Semispray(Chart chart, std::vector<Expr> components) : chart_(chart), components_(std::move(components)) {
    if (components_.size() != chart_.dim()) throw DimensionMismatch("semispray needs 2n components");
}

Semispray::Semispray(Chart chart, ExprMatrix hessian, std::vector<Expr> rhs)
    : chart_(chart), hessian_(std::move(hessian)), rhs_(std::move(rhs)) {
    if (hessian_.rows() != chart_.dim() || rhs_.size() != chart_.dim()) {
        throw DimensionMismatch("semispray system must be 2n x 2n");
    }
}

VectorField Semispray::field() const {
    if (!is_symbolic()) throw std::logic_error("semispray is solved pointwise; no symbolic field");
    return VectorField(chart_, components_);
}

std::vector<double> Semispray::evaluate(std::span<const double> point) const {
    if (is_symbolic()) return evaluate_all(components_, point);
    return solve(hessian_.evaluate(point), evaluate_all(rhs_, point));
}

ODESystem Semispray::as_ode() const {
    if (is_symbolic()) return ODESystem::symbolic(chart_, components_, ODESystem::Provenance::EulerLagrange);
    return ODESystem::linear_solve(chart_, hessian_, rhs_, ODESystem::Provenance::EulerLagrange);
}

// ---------------------------------------------------------------------------
// Forms and energy

DifferentialForm kahler_form(const LagrangianSystem& L) {
    return (-exterior_derivative(vertical_derivative(L.lagrangian(), L.chart()))).simplified();
}

namespace {

// V(L) - L with V = (X, -Y) evaluated from components.
template <class T>
T energy_from(const LagrangianSystem& L, std::span<const T> xi, std::span<const T> grad, const T& lag) {
    const std::size_t N = L.chart().dim();
    T s = -lag;
    for (std::size_t a = 0; a < N; ++a) {
        if (L.chart().is_x(a)) {
            s = s + xi[a] * grad[a];
        } else {
            s = s - xi[a] * grad[a];
        }
    }
    return s;
}

}  // namespace

Expr energy(const LagrangianSystem& L, const Semispray& xi) {
    const VectorField f = xi.field();
    std::vector<Expr> grad;
    for (std::size_t a = 0; a < L.chart().dim(); ++a) grad.push_back(L.gradient(a));
    return simplify(energy_from<Expr>(L, f.components(), grad, L.lagrangian()));
}

double energy_at(const LagrangianSystem& L, const Semispray& xi, std::span<const double> point) {
    const auto v = xi.evaluate(point);
    std::vector<double> grad;
    for (std::size_t a = 0; a < L.chart().dim(); ++a) grad.push_back(evaluate(L.gradient(a), point));
    return energy_from<double>(L, v, grad, evaluate(L.lagrangian(), point));
}

VectorField liouville_field(const Semispray& xi, const ProductStructure& J) { return j_apply(J, xi.field()); }

DifferentialForm energy_differential(const LagrangianSystem& L, const Semispray& xi) {
    const Chart& chart = L.chart();
    const std::size_t N = chart.dim();
    const VectorField f = xi.field();
    DifferentialForm out(chart, 1);
    for (std::size_t b = 0; b < N; ++b) {
        Expr s = -L.gradient(b);
        for (std::size_t a = 0; a < N; ++a) {
            const Expr term = f[a] * L.hessian(b, a);
            s = chart.is_x(a) ? s + term : s - term;
        }
        out.add({static_cast<int>(b)}, s);
    }
    return out.simplified();
}

// ---------------------------------------------------------------------------
// Solve

namespace {

std::vector<Expr> semispray_rhs(const LagrangianSystem& L) {
    const std::size_t N = L.chart().dim();
    std::vector<Expr> b(N);
    for (std::size_t a = 0; a < N; ++a) b[a] = L.chart().is_x(a) ? L.gradient(a) : simplify(-L.gradient(a));
    return b;
}

int sampled_rank(const ExprMatrix& m, const Chart& chart, const SolveOptions& opts) {
    int best = -1;
    for (int t = 0; t < opts.rank_samples; ++t) {
        Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(t)));
        for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
            const auto p = sample_point(chart.n(), rng);
            try {
                best = std::max(best, rank(m.evaluate(p)));
                break;
            } catch (const DomainError&) {
            }
        }
    }
    if (best < 0) throw SamplingExhausted("Hessian of L undefined at every sample point");
    return best;
}

}  // namespace

Semispray solve_semispray(const LagrangianSystem& L, const SolveOptions& opts) {
    const Chart& chart = L.chart();
    const std::size_t N = chart.dim();
    const ExprMatrix& H = L.hessian();
    const int r = sampled_rank(H, chart, opts);
    if (r < static_cast<int>(N)) throw DegenerateLagrangian(r, static_cast<int>(N));

    std::vector<Expr> b = semispray_rhs(L);
    if (N > opts.symbolic_limit) return Semispray(chart, H, std::move(b));

    const Expr det = determinant(H);
    const ExprMatrix adj = adjugate(H);
    std::vector<Expr> v(N);
    for (std::size_t a = 0; a < N; ++a) {
        Expr s(0.0);
        for (std::size_t c = 0; c < N; ++c) s = s + adj(a, c) * b[c];
        v[a] = simplify(simplify(s) / det);
    }
    return Semispray(chart, std::move(v));
}

EulerLagrangeSystem euler_lagrange_system(const LagrangianSystem& L, const SolveOptions& opts) {
    Semispray xi = solve_semispray(L, opts);
    ODESystem odes = xi.as_ode();
    std::vector<Expr> residuals;
    if (xi.is_symbolic()) {
        const std::size_t N = L.chart().dim();
        const VectorField f = xi.field();
        const std::vector<Expr> b = semispray_rhs(L);
        for (std::size_t j = 0; j < N; ++j) {
            Expr s(0.0);
            for (std::size_t a = 0; a < N; ++a) s = s + L.hessian(a, j) * f[a];
            residuals.push_back(simplify(s - b[j]));
        }
    }
    return {std::move(odes), std::move(xi), std::move(residuals)};
}

std::vector<double> EulerLagrangeSystem::residuals_at(const LagrangianSystem& L, std::span<const double> point) const {
    if (!residuals.empty()) return evaluate_all(residuals, point);
    const std::size_t N = L.chart().dim();
    const auto v = semispray.evaluate(point);
    const Matrix H = L.hessian().evaluate(point);
    std::vector<double> out(N);
    for (std::size_t j = 0; j < N; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < N; ++a) s += H(a, j) * v[a];
        const double g = evaluate(L.gradient(j), point);
        out[j] = L.chart().is_x(j) ? s - g : s + g;
    }
    return out;
}

bool satisfies_velocity_condition(const Semispray& xi, int trials, std::uint64_t seed) {
    const Chart& chart = xi.chart();
    const auto n = static_cast<std::size_t>(chart.n());
    if (xi.is_symbolic()) {
        const VectorField f = xi.field();
        for (std::size_t i = 0; i < n; ++i) {
            SampleOptions o;
            o.trials = trials;
            o.seed = seed;
            o.n = chart.n();
            if (!equal_on_samples(f[i], chart.coordinate_expr(n + i), o)) return false;
        }
        return true;
    }
    for (int t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        const auto p = sample_point(chart.n(), rng);
        const auto v = xi.evaluate(p);
        for (std::size_t i = 0; i < n; ++i) {
            if (!close(v[i], p[n + i])) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Trajectory diagnostics

double Proposition1Report::max() const {
    double m = 0.0;
    for (double v : x_family) m = std::max(m, v);
    for (double v : y_family) m = std::max(m, v);
    return m;
}

Proposition1Report proposition1_report(const LagrangianSystem& L, const Trajectory& trajectory) {
    if (trajectory.rows() < 3) throw std::invalid_argument("proposition1_report needs at least 3 trajectory samples");
    const Chart& chart = L.chart();
    const auto n = static_cast<std::size_t>(chart.n());
    const std::size_t rows = trajectory.rows();
    // f[a][k] = dL/d(slot a) at row k
    std::vector<std::vector<double>> f(chart.dim(), std::vector<double>(rows));
    for (std::size_t k = 0; k < rows; ++k) {
        for (std::size_t a = 0; a < chart.dim(); ++a) f[a][k] = evaluate(L.gradient(a), trajectory.row(k));
    }
    Proposition1Report rep{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const double h = trajectory.h();
    for (std::size_t k = 1; k + 1 < rows; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = (f[j][k + 1] - f[j][k - 1]) / (2.0 * h);
            const double dy = (f[n + j][k + 1] - f[n + j][k - 1]) / (2.0 * h);
            rep.x_family[j] = std::max(rep.x_family[j], std::abs(dx - f[j][k]));
            rep.y_family[j] = std::max(rep.y_family[j], std::abs(dy + f[n + j][k]));
        }
    }
    return rep;
}

double ExponentialLawReport::max() const {
    double m = 0.0;
    for (double v : x_family) m = std::max(m, v);
    for (double v : y_family) m = std::max(m, v);
    return m;
}

ExponentialLawReport exponential_law_report(const LagrangianSystem& L, const Trajectory& trajectory) {
    if (trajectory.rows() == 0) throw std::invalid_argument("empty trajectory");
    const Chart& chart = L.chart();
    const auto n = static_cast<std::size_t>(chart.n());
    ExponentialLawReport rep{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n),
                             std::vector<double>(n)};
    const auto p0 = trajectory.row(0);
    for (std::size_t j = 0; j < n; ++j) {
        rep.x_initial[j] = evaluate(L.gradient(j), p0);
        rep.y_initial[j] = evaluate(L.gradient(n + j), p0);
    }
    auto drift = [](double value, double initial) {
        const double scale = std::abs(initial) > 1e-12 ? std::abs(initial) : 1.0;
        return std::abs(value - initial) / scale;
    };
    for (std::size_t k = 0; k < trajectory.rows(); ++k) {
        const auto p = trajectory.row(k);
        const double dt = trajectory.time(k) - trajectory.t0();
        for (std::size_t j = 0; j < n; ++j) {
            const double qx = evaluate(L.gradient(j), p) * std::exp(-dt);
            const double qy = evaluate(L.gradient(n + j), p) * std::exp(dt);
            rep.x_family[j] = std::max(rep.x_family[j], drift(qx, rep.x_initial[j]));
            rep.y_family[j] = std::max(rep.y_family[j], drift(qy, rep.y_initial[j]));
        }
    }
    return rep;
}

}  // namespace pkmech
