#include "pkmech/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pkmech/sampling.hpp"

namespace pkmech {

// ---------------------------------------------------------------------------
// ODESystem and Trajectory

ODESystem::ODESystem(Chart chart, ExprMatrix lhs, std::vector<Expr> rhs, Provenance provenance)
    : chart_(chart), lhs_(std::move(lhs)), rhs_(std::move(rhs)), provenance_(provenance) {
    if (rhs_.size() != chart_.dim()) throw DimensionMismatch("ODE system needs 2n right-hand sides");
    for (const Expr& e : rhs_) {
        if (max_index(e) > chart_.n()) throw DimensionMismatch("right-hand side uses coordinates outside the chart");
    }
    for (const Expr& e : lhs_.data()) {
        if (max_index(e) > chart_.n()) throw DimensionMismatch("system matrix uses coordinates outside the chart");
    }
}

ODESystem ODESystem::symbolic(const Chart& chart, std::vector<Expr> rhs, Provenance provenance) {
    return ODESystem(chart, ExprMatrix(), std::move(rhs), provenance);
}

ODESystem ODESystem::linear_solve(const Chart& chart, ExprMatrix lhs, std::vector<Expr> rhs, Provenance provenance) {
    if (lhs.rows() != chart.dim() || lhs.cols() != chart.dim()) throw DimensionMismatch("system matrix must be 2n x 2n");
    return ODESystem(chart, std::move(lhs), std::move(rhs), provenance);
}

void ODESystem::rates(std::span<const double> state, std::span<double> out) const {
    if (is_symbolic()) {
        for (std::size_t a = 0; a < rhs_.size(); ++a) out[a] = evaluate(rhs_[a], state);
        return;
    }
    const auto v = solve(lhs_.evaluate(state), evaluate_all(rhs_, state));
    std::copy(v.begin(), v.end(), out.begin());
}

std::vector<double> ODESystem::rates(std::span<const double> state) const {
    std::vector<double> out(rhs_.size());
    rates(state, out);
    return out;
}

std::string provenance_name(ODESystem::Provenance p) {
    switch (p) {
        case ODESystem::Provenance::EulerLagrange: return "euler-lagrange";
        case ODESystem::Provenance::Hamiltonian: return "hamiltonian";
        case ODESystem::Provenance::Custom: return "custom";
    }
    return "custom";
}

void Trajectory::push(std::span<const double> state) {
    if (state.size() != dim_) throw DimensionMismatch("trajectory row has wrong dimension");
    data_.insert(data_.end(), state.begin(), state.end());
}

std::string Trajectory::to_csv() const {
    const std::size_t n = dim_ / 2;
    std::string out = "t";
    for (std::size_t i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
    for (std::size_t i = 1; i <= n; ++i) out += ",y" + std::to_string(i);
    out += "\n";
    char buf[40];
    for (std::size_t k = 0; k < rows(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", time(k));
        out += buf;
        for (double v : row(k)) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schemes

Scheme parse_scheme(const std::string& name) {
    if (name == "rk4") return Scheme::RK4;
    if (name == "symplectic_euler" || name == "symplectic-euler") return Scheme::SymplecticEuler;
    throw std::invalid_argument("unknown integration scheme '" + name + "'");
}

std::string scheme_name(Scheme s) { return s == Scheme::RK4 ? "rk4" : "symplectic_euler"; }

std::size_t step_count(double t0, double t1, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("need t1 > t0");
    const double steps = (t1 - t0) / h;
    if (steps > kMaxSteps) throw std::invalid_argument("more than 1e7 steps requested");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(steps)));
}

namespace {

void require_finite(std::span<const double> state, std::size_t step) {
    for (double v : state) {
        if (!std::isfinite(v)) throw IntegrationError("non-finite state", step);
    }
}

void require_dim(std::size_t got, const Chart& chart) {
    if (got != chart.dim()) throw DimensionMismatch("initial state must have 2n components");
}

}  // namespace

Trajectory integrate_rk4(const ODESystem& sys, std::span<const double> state0, double t0, double t1, double h) {
    require_dim(state0.size(), sys.chart());
    const std::size_t steps = step_count(t0, t1, h);
    const std::size_t N = state0.size();
    Trajectory traj(t0, h, N);
    traj.reserve(steps + 1);
    std::vector<double> s(state0.begin(), state0.end());
    require_finite(s, 0);
    traj.push(s);
    std::vector<double> k1(N), k2(N), k3(N), k4(N), tmp(N);
    for (std::size_t k = 1; k <= steps; ++k) {
        try {
            sys.rates(s, k1);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
            sys.rates(tmp, k2);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
            sys.rates(tmp, k3);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = s[i] + h * k3[i];
            sys.rates(tmp, k4);
        } catch (const DomainError& e) {
            throw IntegrationError(std::string("right-hand side undefined (") + e.what() + ")", k);
        } catch (const SingularMatrix&) {
            throw IntegrationError("singular semispray system", k);
        }
        for (std::size_t i = 0; i < N; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        require_finite(s, k);
        traj.push(s);
    }
    return traj;
}

namespace {

struct SymplecticEulerStepper {
    explicit SymplecticEulerStepper(const HamiltonianSystem& H) : n(static_cast<std::size_t>(H.chart().n())) {
        const Chart& chart = H.chart();
        for (std::size_t i = 0; i < n; ++i) {
            hx.push_back(simplify(differentiate(H.hamiltonian(), chart.coordinate(i))));
            hy.push_back(simplify(differentiate(H.hamiltonian(), chart.coordinate(n + i))));
        }
        hxy = ExprMatrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) hxy(i, j) = simplify(differentiate(hx[i], chart.coordinate(n + j)));
        }
    }

    // Advances s in place.
    void step(std::vector<double>& s, double h, std::size_t index) const {
        std::vector<double> p(s);  // (x_k, Y)
        const std::vector<double> y0(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
        auto residual = [&](const std::vector<double>& q) {
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n; ++i) r[i] = q[n + i] - y0[i] + h * evaluate(hx[i], q);
            return r;
        };
        auto norm = [](const std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m = std::max(m, std::abs(x));
            return m;
        };
        bool converged = false;
        std::vector<double> r = residual(p);
        for (int iter = 0; iter < kNewtonIterations; ++iter) {
            double scale = 1.0;
            for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(p[n + i]));
            if (norm(r) <= kNewtonTolerance * scale) {
                converged = true;
                break;
            }
            Matrix jac(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) jac(i, j) = (i == j ? 1.0 : 0.0) + h * evaluate(hxy(i, j), p);
            }
            std::vector<double> delta;
            try {
                delta = solve(jac, r);
            } catch (const SingularMatrix&) {
                break;
            }
            // Damped update: halve until the residual decreases.
            double lambda = 1.0;
            std::vector<double> trial(p);
            std::vector<double> rt;
            for (int halving = 0; halving < 20; ++halving) {
                for (std::size_t i = 0; i < n; ++i) trial[n + i] = p[n + i] - lambda * delta[i];
                try {
                    rt = residual(trial);
                    if (norm(rt) < norm(r) || halving == 19) break;
                } catch (const DomainError&) {
                }
                lambda *= 0.5;
            }
            if (rt.empty()) break;
            p = trial;
            r = rt;
        }
        if (!converged) {
            double scale = 1.0;
            for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(p[n + i]));
            if (!(norm(r) <= kNewtonTolerance * scale)) throw IntegrationError("Newton iteration did not converge", index);
        }
        for (std::size_t i = 0; i < n; ++i) s[n + i] = p[n + i];
        for (std::size_t i = 0; i < n; ++i) s[i] = p[i] + h * evaluate(hy[i], p);
    }

    static constexpr int kNewtonIterations = 25;
    static constexpr double kNewtonTolerance = 1e-12;

    std::size_t n;
    std::vector<Expr> hx;
    std::vector<Expr> hy;
    ExprMatrix hxy;
};

}  // namespace

Trajectory integrate_symplectic_euler(const HamiltonianSystem& H, std::span<const double> state0, double t0,
                                      double t1, double h) {
    require_dim(state0.size(), H.chart());
    const std::size_t steps = step_count(t0, t1, h);
    const SymplecticEulerStepper stepper(H);
    Trajectory traj(t0, h, state0.size());
    traj.reserve(steps + 1);
    std::vector<double> s(state0.begin(), state0.end());
    require_finite(s, 0);
    traj.push(s);
    for (std::size_t k = 1; k <= steps; ++k) {
        try {
            stepper.step(s, h, k);
        } catch (const DomainError& e) {
            throw IntegrationError(std::string("Hamiltonian derivative undefined (") + e.what() + ")", k);
        }
        require_finite(s, k);
        traj.push(s);
    }
    return traj;
}

Trajectory integrate(const HamiltonianSystem& H, Scheme scheme, std::span<const double> state0, double t0, double t1,
                     double h) {
    if (scheme == Scheme::SymplecticEuler) return integrate_symplectic_euler(H, state0, t0, t1, h);
    return integrate_rk4(hamilton_odes(H), state0, t0, t1, h);
}

std::vector<Trajectory> integrate_batch(const ODESystem& sys, const std::vector<std::vector<double>>& states,
                                        double t0, double t1, double h, Execution ex) {
    std::vector<Trajectory> out(states.size(), Trajectory(t0, h, sys.chart().dim()));
    for_each_index(states.size(), ex, [&](std::size_t i) { out[i] = integrate_rk4(sys, states[i], t0, t1, h); });
    return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

ConservationReport conservation_report(const Trajectory& trajectory, const Expr& quantity) {
    if (trajectory.rows() == 0) throw std::invalid_argument("empty trajectory");
    ConservationReport rep;
    for (std::size_t k = 0; k < trajectory.rows(); ++k) {
        double q = 0.0;
        try {
            q = evaluate(quantity, trajectory.row(k));
        } catch (const DomainError& e) {
            throw IntegrationError(std::string("quantity undefined (") + e.what() + ")", k);
        }
        if (k == 0) {
            rep.first = rep.min = rep.max = q;
        }
        rep.min = std::min(rep.min, q);
        rep.max = std::max(rep.max, q);
        rep.last = q;
        const double scale = std::abs(rep.first) > 1e-12 ? std::abs(rep.first) : 1.0;
        rep.max_relative_drift = std::max(rep.max_relative_drift, std::abs(q - rep.first) / scale);
    }
    return rep;
}

double symplecticity_check(const HamiltonianSystem& H, Scheme scheme, std::span<const double> state0, double h,
                           std::size_t steps) {
    const Chart& chart = H.chart();
    require_dim(state0.size(), chart);
    const std::size_t N = chart.dim();
    const double t1 = h * static_cast<double>(steps);
    auto flow = [&](std::span<const double> s) {
        const Trajectory tr = integrate(H, scheme, s, 0.0, t1, h);
        const auto last = tr.back();
        return std::vector<double>(last.begin(), last.end());
    };
    constexpr double eps = 1e-6;
    Matrix M(N, N);
    std::vector<double> plus(state0.begin(), state0.end());
    std::vector<double> minus(state0.begin(), state0.end());
    for (std::size_t j = 0; j < N; ++j) {
        plus[j] += eps;
        minus[j] -= eps;
        const auto fp = flow(plus);
        const auto fm = flow(minus);
        for (std::size_t i = 0; i < N; ++i) M(i, j) = (fp[i] - fm[i]) / (2.0 * eps);
        plus[j] = state0[j];
        minus[j] = state0[j];
    }
    const ExprMatrix W = canonical_form(chart).as_matrix();
    const Matrix Omega = W.evaluate(std::vector<double>(N, 0.0));
    return (M.transpose() * Omega * M - Omega).max_abs();
}

}  // namespace pkmech
