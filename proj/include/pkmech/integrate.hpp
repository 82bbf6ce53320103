#ifndef PKMECH_INTEGRATE_HPP
#define PKMECH_INTEGRATE_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pkmech/execution.hpp"
#include "pkmech/hamilton.hpp"
#include "pkmech/ode.hpp"

namespace pkmech {

/// Numeric failure during a run, tagged with the step at which it happened.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

enum class Scheme { RK4, SymplecticEuler };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

inline constexpr double kMaxSteps = 1e7;

/// Number of uniform steps covering [t0, t1]; validates h > 0, t1 > t0 and the step cap.
std::size_t step_count(double t0, double t1, double h);

/// Classical fourth-order Runge-Kutta on a uniform grid.
Trajectory integrate_rk4(const ODESystem& sys, std::span<const double> state0, double t0, double t1, double h);

/// Semi-implicit Euler treating x as positions and y as momenta:
///   y_{k+1} = y_k - h dH/dx(x_k, y_{k+1})   (Newton, tol 1e-12, <= 25 iterations)
///   x_{k+1} = x_k + h dH/dy(x_k, y_{k+1})
Trajectory integrate_symplectic_euler(const HamiltonianSystem& H, std::span<const double> state0, double t0,
                                      double t1, double h);

Trajectory integrate(const HamiltonianSystem& H, Scheme scheme, std::span<const double> state0, double t0,
                     double t1, double h);

/// Independent runs from several initial states. Each run is sequential; runs
/// are distributed over threads in parallel mode.
std::vector<Trajectory> integrate_batch(const ODESystem& sys, const std::vector<std::vector<double>>& states,
                                        double t0, double t1, double h, Execution ex = Execution::Parallel);

struct ConservationReport {
    double first = 0.0;
    double last = 0.0;
    double min = 0.0;
    double max = 0.0;
    /// max_k |q_k - q_0| / |q_0| (absolute when |q_0| < 1e-12).
    double max_relative_drift = 0.0;
};

ConservationReport conservation_report(const Trajectory& trajectory, const Expr& quantity);

/// Max entry of |M^T Ω M - Ω| where M is the central-difference Jacobian (step
/// 1e-6) of the composed flow map and Ω the matrix of dx_i ^ dy_i.
double symplecticity_check(const HamiltonianSystem& H, Scheme scheme, std::span<const double> state0, double h,
                           std::size_t steps);

}  // namespace pkmech

#endif  // PKMECH_INTEGRATE_HPP
