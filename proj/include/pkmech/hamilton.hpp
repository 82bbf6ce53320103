#ifndef PKMECH_HAMILTON_HPP
#define PKMECH_HAMILTON_HPP

#include "pkmech/geometry.hpp"
#include "pkmech/ode.hpp"

namespace pkmech {

class HamiltonianSystem {
public:
    HamiltonianSystem(Chart chart, Expr hamiltonian);

    const Chart& chart() const { return chart_; }
    const Expr& hamiltonian() const { return H_; }

private:
    Chart chart_;
    Expr H_;
};

/// λ = J*(ω) with ω = 1/2 y_i dx_i + 1/2 x_i dy_i, i.e. 1/2 y_i dx_i - 1/2 x_i dy_i.
DifferentialForm liouville_one_form(const Chart& chart);

/// Φ = -dλ = dx_i ^ dy_i.
DifferentialForm canonical_form(const Chart& chart);

/// Z_H from the linear solve i_Z Φ = dH against the canonical form.
VectorField hamiltonian_vector_field(const HamiltonianSystem& H);

/// Z_H = dH/dy_i d/dx_i - dH/dx_i d/dy_i, written out directly.
VectorField hamiltonian_vector_field_closed_form(const HamiltonianSystem& H);

/// dx_i/dt = dH/dy_i, dy_i/dt = -dH/dx_i.
ODESystem hamilton_odes(const HamiltonianSystem& H);

}  // namespace pkmech

#endif  // PKMECH_HAMILTON_HPP
