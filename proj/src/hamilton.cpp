#include "pkmech/hamilton.hpp"

namespace pkmech {

HamiltonianSystem::HamiltonianSystem(Chart chart, Expr hamiltonian) : chart_(chart), H_(std::move(hamiltonian)) {
    if (max_index(H_) > chart_.n()) {
        throw DimensionMismatch("Hamiltonian uses coordinates beyond n = " + std::to_string(chart_.n()));
    }
}

DifferentialForm liouville_one_form(const Chart& chart) {
    const auto n = static_cast<std::size_t>(chart.n());
    DifferentialForm omega(chart, 1);
    for (std::size_t i = 0; i < n; ++i) {
        omega.add({static_cast<int>(i)}, Expr(0.5) * chart.coordinate_expr(n + i));
        omega.add({static_cast<int>(n + i)}, Expr(0.5) * chart.coordinate_expr(i));
    }
    return j_dual_apply(model_product_structure(chart).dual(), omega);
}

DifferentialForm canonical_form(const Chart& chart) {
    return (-exterior_derivative(liouville_one_form(chart))).simplified();
}

VectorField hamiltonian_vector_field(const HamiltonianSystem& H) {
    const Chart& chart = H.chart();
    const std::size_t N = chart.dim();
    const DifferentialForm phi = canonical_form(chart);
    const ExprMatrix W = phi.as_matrix();
    // (i_Z Φ)_b = Z^a W_ab, so W^T Z = dH. Φ has constant coefficients.
    Matrix Wt(N, N);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) {
            const Expr& w = W(a, b);
            if (!w.is_const()) throw std::logic_error("canonical form must have constant coefficients");
            Wt(b, a) = w.value();
        }
    }
    const Matrix inv = inverse(Wt);
    const DifferentialForm dH = exterior_derivative(DifferentialForm::scalar(chart, H.hamiltonian()));
    std::vector<Expr> Z(N);
    for (std::size_t a = 0; a < N; ++a) {
        Expr s(0.0);
        for (std::size_t b = 0; b < N; ++b) {
            if (inv(a, b) != 0.0) s = s + Expr(inv(a, b)) * dH.coefficient({static_cast<int>(b)});
        }
        Z[a] = simplify(s);
    }
    return VectorField(chart, std::move(Z));
}

VectorField hamiltonian_vector_field_closed_form(const HamiltonianSystem& H) {
    const Chart& chart = H.chart();
    const auto n = static_cast<std::size_t>(chart.n());
    std::vector<Expr> Z(chart.dim());
    for (std::size_t i = 0; i < n; ++i) {
        Z[i] = simplify(differentiate(H.hamiltonian(), chart.coordinate(n + i)));
        Z[n + i] = simplify(-differentiate(H.hamiltonian(), chart.coordinate(i)));
    }
    return VectorField(chart, std::move(Z));
}

ODESystem hamilton_odes(const HamiltonianSystem& H) {
    const VectorField Z = hamiltonian_vector_field(H);
    return ODESystem::symbolic(H.chart(), std::vector<Expr>(Z.components().begin(), Z.components().end()),
                               ODESystem::Provenance::Hamiltonian);
}

}  // namespace pkmech
