#ifndef PKMECH_GEOMETRY_HPP
#define PKMECH_GEOMETRY_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pkmech/expr.hpp"
#include "pkmech/linalg.hpp"

namespace pkmech {

/// Global chart on R^(2n) with coordinates ordered (x1..xn, y1..yn).
class Chart {
public:
    explicit Chart(int n);

    int n() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(2 * n_); }
    Variable coordinate(std::size_t slot) const;
    Expr coordinate_expr(std::size_t slot) const { return Expr(coordinate(slot)); }
    bool is_x(std::size_t slot) const { return slot < static_cast<std::size_t>(n_); }

    friend bool operator==(const Chart&, const Chart&) = default;

private:
    int n_;
};

Expr parse(std::string_view source, const Chart& chart);

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Tangent vector field with one component per coordinate slot.
class VectorField {
public:
    VectorField(Chart chart, std::vector<Expr> components);

    static VectorField zero(const Chart& chart);
    static VectorField basis(const Chart& chart, std::size_t slot);
    static VectorField constant(const Chart& chart, std::span<const double> values);

    const Chart& chart() const { return chart_; }
    std::span<const Expr> components() const { return components_; }
    const Expr& operator[](std::size_t slot) const { return components_[slot]; }

    /// Componentwise simplify().
    VectorField simplified() const;
    /// X(f) = sum_a X^a df/dx^a.
    Expr apply(const Expr& f) const;

    std::string str() const;

private:
    Chart chart_;
    std::vector<Expr> components_;
};

/// Degree-k differential form stored sparsely on strictly increasing index tuples.
class DifferentialForm {
public:
    using Index = std::vector<int>;

    DifferentialForm(Chart chart, int degree);

    static DifferentialForm scalar(const Chart& chart, const Expr& f);
    /// The coordinate differential d(coordinate(slot)).
    static DifferentialForm basis(const Chart& chart, std::size_t slot);

    const Chart& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<Index, Expr>& terms() const { return terms_; }

    /// Accumulate coef * dx^{i1} ^ ... ^ dx^{ik} for an arbitrary index tuple; the
    /// tuple is sorted with the permutation sign and dropped if an index repeats.
    void add(Index indices, const Expr& coef);

    /// Coefficient for any tuple; unsorted tuples pick up the permutation sign.
    Expr coefficient(Index indices) const;
    /// For degree 0.
    Expr scalar_value() const { return coefficient({}); }

    /// Simplifies coefficients and drops those that become 0.
    DifferentialForm simplified() const;
    bool is_structurally_zero() const;

    /// Coefficient matrix of a 2-form (antisymmetric, dim x dim).
    ExprMatrix as_matrix() const;

    DifferentialForm operator+(const DifferentialForm& other) const;
    DifferentialForm operator-(const DifferentialForm& other) const;
    DifferentialForm operator-() const;
    DifferentialForm scaled(const Expr& factor) const;

    /// Text like "2 · dx1^dy1 + (x1 + y1) · dx2^dy2"; "0" for the zero form.
    std::string str() const;

private:
    Chart chart_;
    int degree_;
    std::map<Index, Expr> terms_;
};

/// Symmetric (0,2) tensor. Only the upper triangle is stored, so g_ab = g_ba
/// holds by construction.
class Metric {
public:
    /// Rejects a matrix whose (a,b) and (b,a) entries are not the same expression
    /// after simplification.
    static Metric from_matrix(const Chart& chart, const ExprMatrix& m);

    const Chart& chart() const { return chart_; }
    const Expr& operator()(std::size_t a, std::size_t b) const;
    ExprMatrix matrix() const;
    Matrix evaluate(std::span<const double> point) const;

    /// det g != 0 at every one of `trials` sample points.
    bool is_nondegenerate(int trials = 20, std::uint64_t seed = 0) const;

private:
    Metric(Chart chart, std::vector<Expr> upper) : chart_(chart), upper_(std::move(upper)) {}
    std::size_t index(std::size_t a, std::size_t b) const;

    Chart chart_;
    std::vector<Expr> upper_;
};

/// (1,1) tensor J^a_b acting on vectors as (JX)^a = J^a_b X^b and, through the
/// dual flag, on 1-forms as (J*α)_b = α_a J^a_b.
class ProductStructure {
public:
    ProductStructure(Chart chart, ExprMatrix matrix, bool dual = false);

    const Chart& chart() const { return chart_; }
    const ExprMatrix& matrix() const { return matrix_; }
    const Expr& operator()(std::size_t a, std::size_t b) const { return matrix_(a, b); }
    bool is_dual() const { return dual_; }
    /// The same tensor flagged as J*.
    ProductStructure dual() const { return ProductStructure(chart_, matrix_, true); }

private:
    Chart chart_;
    ExprMatrix matrix_;
    bool dual_;
};

/// g = dx_i (x) dy_i + dy_i (x) dx_i.
Metric model_metric(const Chart& chart);
/// J = diag(+1 on x-slots, -1 on y-slots).
ProductStructure model_product_structure(const Chart& chart);

Expr metric_apply(const Metric& g, const VectorField& X, const VectorField& Y);
VectorField j_apply(const ProductStructure& J, const VectorField& X);
DifferentialForm j_dual_apply(const ProductStructure& J, const DifferentialForm& alpha);

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm exterior_derivative(const DifferentialForm& omega);
/// d_J f = sum_i df/dx_i dx_i - df/dy_i dy_i.
DifferentialForm vertical_derivative(const Expr& f, const Chart& chart);
/// (i_J ω)(X_1..X_k) = sum_m ω(X_1, .., J X_m, .., X_k) for k <= 2.
DifferentialForm insertion_operator(const ProductStructure& J, const DifferentialForm& omega);
/// Contraction in the first slot: (i_X ω)_{b..} = X^a ω_{a b..}.
DifferentialForm interior_product(const VectorField& X, const DifferentialForm& omega);

/// J^2 = Id at sample points and J is neither +Id nor -Id.
bool is_almost_product(const ProductStructure& J, int trials = 20, std::uint64_t seed = 0);

/// Max |g(JX,Y) + g(X,JY)| over random constant fields X, Y in [-1,1] and
/// random points.
double compatibility_violation(const Metric& g, const ProductStructure& J, int trials = 100,
                               std::uint64_t seed = 0);
/// compatibility_violation below 1e-9 and J an almost product structure.
bool compatibility_check(const Metric& g, const ProductStructure& J, int trials = 100, std::uint64_t seed = 0);

}  // namespace pkmech

#endif  // PKMECH_GEOMETRY_HPP
