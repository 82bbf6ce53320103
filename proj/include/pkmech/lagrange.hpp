#ifndef PKMECH_LAGRANGE_HPP
#define PKMECH_LAGRANGE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pkmech/geometry.hpp"
#include "pkmech/ode.hpp"

namespace pkmech {

/// The coefficient system for the semispray is singular at every sample point.
class DegenerateLagrangian : public std::runtime_error {
public:
    DegenerateLagrangian(int rank, int dim);
    int rank() const noexcept { return rank_; }
    int dim() const noexcept { return dim_; }

private:
    int rank_;
    int dim_;
};

/// A Lagrangian L(x, y) on the chart. The derivation convention holds the
/// semispray components X_i, Y_i constant under d when forming dE_L.
class LagrangianSystem {
public:
    LagrangianSystem(Chart chart, Expr lagrangian);

    const Chart& chart() const { return chart_; }
    const Expr& lagrangian() const { return L_; }
    /// dL/d(coordinate slot), simplified.
    const Expr& gradient(std::size_t slot) const { return grad_[slot]; }
    /// Second partials, simplified.
    const Expr& hessian(std::size_t a, std::size_t b) const { return hess_(a, b); }
    const ExprMatrix& hessian() const { return hess_; }

private:
    Chart chart_;
    Expr L_;
    std::vector<Expr> grad_;
    ExprMatrix hess_;
};

/// Semispray ξ = X_i d/dx_i + Y_i d/dy_i solving
///   sum_i L_{x_j x_i} X_i + L_{x_j y_i} Y_i =  L_{x_j}
///   sum_i L_{y_j x_i} X_i + L_{y_j y_i} Y_i = -L_{y_j}
/// i.e. Hess(L) (X, Y) = (L_x, -L_y).
class Semispray {
public:
    /// Symbolic components (X_1..X_n, Y_1..Y_n).
    Semispray(Chart chart, std::vector<Expr> components);
    /// Per-point solve of Hess(L) v = b.
    Semispray(Chart chart, ExprMatrix hessian, std::vector<Expr> rhs);

    const Chart& chart() const { return chart_; }
    bool is_symbolic() const { return hessian_.rows() == 0; }
    /// Symbolic path only.
    VectorField field() const;
    std::vector<double> evaluate(std::span<const double> point) const;
    ODESystem as_ode() const;

private:
    Chart chart_;
    std::vector<Expr> components_;
    ExprMatrix hessian_;
    std::vector<Expr> rhs_;
};

struct EulerLagrangeSystem {
    ODESystem odes;
    Semispray semispray;
    /// 2n residuals, x-family first:
    ///   sum_i [L_{x_i x_j} X_i + L_{y_i x_j} Y_i] - L_{x_j}
    ///   sum_i [L_{x_i y_j} X_i + L_{y_i y_j} Y_i] + L_{y_j}
    /// Empty when the semispray is evaluated pointwise; use residuals_at().
    std::vector<Expr> residuals;

    std::vector<double> residuals_at(const LagrangianSystem& L, std::span<const double> point) const;
};

/// Φ_L = -d d_J L.
DifferentialForm kahler_form(const LagrangianSystem& L);

/// E_L = X_i dL/dx_i - Y_i dL/dy_i - L (symbolic semispray).
Expr energy(const LagrangianSystem& L, const Semispray& xi);
double energy_at(const LagrangianSystem& L, const Semispray& xi, std::span<const double> point);

/// V = J ξ.
VectorField liouville_field(const Semispray& xi, const ProductStructure& J);

/// dE_L with X_i, Y_i held constant:
///   [X_i L_{x_j x_i} - Y_i L_{x_j y_i} - L_{x_j}] dx_j
/// + [X_i L_{y_j x_i} - Y_i L_{y_j y_i} - L_{y_j}] dy_j
DifferentialForm energy_differential(const LagrangianSystem& L, const Semispray& xi);

struct SolveOptions {
    std::uint64_t seed = 0;
    int rank_samples = 8;
    /// Largest 2n for the symbolic adjugate solve.
    std::size_t symbolic_limit = 4;
};

Semispray solve_semispray(const LagrangianSystem& L, const SolveOptions& opts = {});

EulerLagrangeSystem euler_lagrange_system(const LagrangianSystem& L, const SolveOptions& opts = {});

/// Whether the solved semispray satisfies X_i = y_i, the velocity condition
/// attached to the semispray ansatz (reported, never imposed).
bool satisfies_velocity_condition(const Semispray& xi, int trials = 50, std::uint64_t seed = 0);

/// Along a trajectory, with central differences for d/dt:
///   x_family[j] = max |d/dt(L_{x_j}) - L_{x_j}|   (J eigenvalue +1)
///   y_family[j] = max |d/dt(L_{y_j}) + L_{y_j}|   (J eigenvalue -1)
struct Proposition1Report {
    std::vector<double> x_family;
    std::vector<double> y_family;
    double max() const;
};

Proposition1Report proposition1_report(const LagrangianSystem& L, const Trajectory& trajectory);

/// Relative drift of L_{x_j}(t) e^{-t} and L_{y_j}(t) e^{t} from their initial
/// values; both are constant along exact Euler-Lagrange trajectories.
struct ExponentialLawReport {
    std::vector<double> x_family;
    std::vector<double> y_family;
    std::vector<double> x_initial;
    std::vector<double> y_initial;
    double max() const;
};

ExponentialLawReport exponential_law_report(const LagrangianSystem& L, const Trajectory& trajectory);

}  // namespace pkmech

#endif  // PKMECH_LAGRANGE_HPP
