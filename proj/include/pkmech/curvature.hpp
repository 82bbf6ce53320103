#ifndef PKMECH_CURVATURE_HPP
#define PKMECH_CURVATURE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pkmech/execution.hpp"
#include "pkmech/geometry.hpp"

namespace pkmech {

inline constexpr double kDegeneracyThreshold = 1e-9;
inline constexpr double kIsotropyThreshold = 1e-9;
inline constexpr double kSpaceFormTolerance = 1e-6;

class SingularMetric : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegeneratePlane : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IsotropicVector : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-flat para-Kähler test metrics: g(d/dx_i, d/dy_j) = d^2 φ / dx_i dy_j with
/// vanishing x-x and y-y blocks.
Metric metric_from_potential(const Expr& potential, const Chart& chart);

/// Levi-Civita connection Γ^a_{bc}, symmetric in (b, c).
///
/// For 2n <= 4, or any metric with constant components, the symbols are kept
/// as expressions built from the adjugate inverse. Above that they are
/// produced per point from a numeric inverse.
class ChristoffelSymbols {
public:
    explicit ChristoffelSymbols(const Metric& g);

    const Chart& chart() const { return g_.chart(); }
    bool is_symbolic() const { return !symbols_.empty(); }
    /// Symbolic path only.
    const Expr& operator()(std::size_t a, std::size_t b, std::size_t c) const;
    /// Dense values, index (a*N + b)*N + c.
    std::vector<double> evaluate(std::span<const double> point) const;
    /// Dense derivatives d_e Γ^a_{bc}, index ((e*N + a)*N + b)*N + c.
    std::vector<double> evaluate_derivatives(std::span<const double> point) const;

private:
    std::size_t at(std::size_t a, std::size_t b, std::size_t c) const;

    Metric g_;
    std::vector<Expr> symbols_;
    std::vector<Expr> dmetric_;   // d_e g_ab, pointwise path
    std::vector<Expr> ddmetric_;  // d_f d_e g_ab, pointwise path
};

/// Covariant (0,4) tensor with R(X,Y,Z,V) = R_abcd X^a Y^b Z^c V^d.
///
/// All N^4 components are addressable, so tensors violating the curvature
/// symmetries can be represented and diagnosed.
class CurvatureTensor {
public:
    using PointEvaluator = std::function<std::vector<double>(std::span<const double>)>;

    static CurvatureTensor from_components(const Chart& chart, std::vector<Expr> components);
    static CurvatureTensor from_evaluator(const Chart& chart, PointEvaluator evaluator);
    static CurvatureTensor zero(const Chart& chart);

    const Chart& chart() const { return chart_; }
    bool is_symbolic() const { return !components_.empty(); }
    /// Symbolic path only.
    const Expr& operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const;

    /// Dense values at a point, index ((a*N + b)*N + c)*N + d.
    std::vector<double> evaluate(std::span<const double> point, Execution ex = Execution::Serial) const;
    /// R(X,Y,Z,V) at a point for numeric vectors.
    double apply(std::span<const double> point, std::span<const double> X, std::span<const double> Y,
                 std::span<const double> Z, std::span<const double> V) const;

    CurvatureTensor scaled(double factor) const;
    /// Symbolic tensors only: components simplify to the constant 0.
    bool is_structurally_zero() const;

private:
    CurvatureTensor(Chart chart, std::vector<Expr> components, PointEvaluator evaluator)
        : chart_(chart), components_(std::move(components)), evaluator_(std::move(evaluator)) {}

    Chart chart_;
    std::vector<Expr> components_;
    PointEvaluator evaluator_;
};

ChristoffelSymbols christoffel(const Metric& g);

/// R(X,Y,Z,V) = g(R(X,Y)Z, V) with R(X,Y) = [∇_X, ∇_Y] - ∇_[X,Y].
CurvatureTensor riemann(const Metric& g);
CurvatureTensor riemann(const Metric& g, const ChristoffelSymbols& gamma);

/// Pointwise numeric tensor contractions a*N+b style on dense arrays.
double contract4(std::span<const double> dense, std::size_t dim, std::span<const double> X,
                 std::span<const double> Y, std::span<const double> Z, std::span<const double> V);

struct IdentityViolation {
    double basis = 0.0;   ///< over all coordinate-basis index tuples
    double random = 0.0;  ///< over random constant vectors in [-1,1]
    double max() const { return basis > random ? basis : random; }
};

/// Max violations of the curvature identities at sampled points.
struct SymmetryReport {
    IdentityViolation antisymmetry_first;   ///< R(X,Y,Z,V) + R(Y,X,Z,V)
    IdentityViolation antisymmetry_last;    ///< R(X,Y,Z,V) + R(X,Y,V,Z)
    IdentityViolation bianchi;              ///< cyclic sum over X, Y, Z
    IdentityViolation j_identity;           ///< R(JX,JY,Z,V) + R(X,Y,Z,V), para-Kähler form
    IdentityViolation j_identity_unsigned;  ///< R(JX,JY,Z,V) - R(X,Y,Z,V), holds only for R = 0

    /// First three identities below tol (they hold for every metric).
    bool metric_identities_hold(double tol) const;
};

SymmetryReport symmetry_report(const CurvatureTensor& R, const ProductStructure& J, int trials = 20,
                               std::uint64_t seed = 0, Execution ex = Execution::Parallel);

/// Max over sampled points and indices of |(∇_a J)^b_c|.
double nabla_J(const Metric& g, const ProductStructure& J, int trials = 10, std::uint64_t seed = 0);
double nabla_J(const ChristoffelSymbols& gamma, const ProductStructure& J, int trials = 10, std::uint64_t seed = 0);

/// The comparison tensor
/// R0(X,Y,Z,V) = 1/4 { g(X,Z)g(Y,V) - g(X,V)g(Y,Z) - g(X,JZ)g(Y,JV)
///                     + g(X,JV)g(Y,JZ) - 2 g(X,JY)g(Z,JV) }.
CurvatureTensor r_zero(const Metric& g, const ProductStructure& J);

struct SectionalPlane {
    std::vector<double> point;
    std::vector<double> u;
    std::vector<double> v;
};

/// R(u,v,u,v) / (g(u,u)g(v,v) - g(u,v)^2) at plane.point.
double sectional_curvature(const CurvatureTensor& R, const Metric& g, const SectionalPlane& plane);

/// Sectional curvature of span{u, Ju}.
double j_sectional_curvature(const CurvatureTensor& R, const Metric& g, const ProductStructure& J,
                             std::span<const double> u, std::span<const double> point);

struct SpaceFormFit {
    std::optional<double> c;  ///< empty: not a space form
    double max_residual = 0.0;
};

/// Least-squares c with R ≈ c R0 over all components at sampled points.
SpaceFormFit constant_c_test(const CurvatureTensor& R, const CurvatureTensor& R0, int trials = 10,
                             std::uint64_t seed = 0, Execution ex = Execution::Parallel);

}  // namespace pkmech

#endif  // PKMECH_CURVATURE_HPP
