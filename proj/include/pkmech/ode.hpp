#ifndef PKMECH_ODE_HPP
#define PKMECH_ODE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pkmech/geometry.hpp"
#include "pkmech/linalg.hpp"

namespace pkmech {

/// Autonomous first-order system d(state)/dt = F(state) on a chart, state
/// ordered (x1..xn, y1..yn).
///
/// F is either a vector of expressions or the solution of a linear system
/// A(state) F = b(state) solved per evaluation (used for Euler-Lagrange systems
/// whose symbolic solve would be too large).
class ODESystem {
public:
    enum class Provenance { EulerLagrange, Hamiltonian, Custom };

    static ODESystem symbolic(const Chart& chart, std::vector<Expr> rhs, Provenance provenance = Provenance::Custom);
    static ODESystem linear_solve(const Chart& chart, ExprMatrix lhs, std::vector<Expr> rhs,
                                  Provenance provenance = Provenance::Custom);

    const Chart& chart() const { return chart_; }
    Provenance provenance() const { return provenance_; }
    bool is_symbolic() const { return lhs_.rows() == 0; }
    /// Right-hand sides (symbolic systems) or the vector b (linear-solve systems).
    std::span<const Expr> rhs() const { return rhs_; }
    const ExprMatrix& lhs() const { return lhs_; }

    void rates(std::span<const double> state, std::span<double> out) const;
    std::vector<double> rates(std::span<const double> state) const;

private:
    ODESystem(Chart chart, ExprMatrix lhs, std::vector<Expr> rhs, Provenance provenance);

    Chart chart_;
    ExprMatrix lhs_;
    std::vector<Expr> rhs_;
    Provenance provenance_;
};

std::string provenance_name(ODESystem::Provenance p);

/// Uniform-grid trajectory; row k is the state at t0 + k*h.
class Trajectory {
public:
    Trajectory(double t0, double h, std::size_t dim) : t0_(t0), h_(h), dim_(dim) {}

    double t0() const { return t0_; }
    double h() const { return h_; }
    std::size_t dim() const { return dim_; }
    /// Number of steps; rows() == steps() + 1 once populated.
    std::size_t steps() const { return rows() == 0 ? 0 : rows() - 1; }
    std::size_t rows() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    double time(std::size_t row) const { return t0_ + static_cast<double>(row) * h_; }
    std::span<const double> row(std::size_t k) const { return {data_.data() + k * dim_, dim_}; }
    std::span<const double> back() const { return row(rows() - 1); }

    void push(std::span<const double> state);
    void reserve(std::size_t rows) { data_.reserve(rows * dim_); }

    /// CSV with header "t,x1,..,xn,y1,..,yn" and 17 significant digits.
    std::string to_csv() const;

private:
    double t0_;
    double h_;
    std::size_t dim_;
    std::vector<double> data_;
};

}  // namespace pkmech

#endif  // PKMECH_ODE_HPP
