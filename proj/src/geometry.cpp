#include "pkmech/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pkmech/sampling.hpp"

namespace pkmech {

Chart::Chart(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("chart needs n >= 1 (dimension 2n >= 2)");
}

Variable Chart::coordinate(std::size_t slot) const {
    if (slot >= dim()) throw std::out_of_range("coordinate slot out of range");
    const int s = static_cast<int>(slot);
    return s < n_ ? Variable{CoordKind::X, s + 1} : Variable{CoordKind::Y, s - n_ + 1};
}

Expr parse(std::string_view source, const Chart& chart) { return parse(source, chart.n()); }

namespace {

void require_same_chart(const Chart& a, const Chart& b, const char* what) {
    if (!(a == b)) {
        throw DimensionMismatch(std::string(what) + ": charts of dimension " + std::to_string(a.dim()) + " and " +
                                std::to_string(b.dim()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(Chart chart, std::vector<Expr> components)
    : chart_(chart), components_(std::move(components)) {
    if (components_.size() != chart_.dim()) {
        throw DimensionMismatch("vector field needs " + std::to_string(chart_.dim()) + " components, got " +
                                std::to_string(components_.size()));
    }
}

VectorField VectorField::zero(const Chart& chart) { return VectorField(chart, std::vector<Expr>(chart.dim())); }

VectorField VectorField::basis(const Chart& chart, std::size_t slot) {
    std::vector<Expr> c(chart.dim());
    c.at(slot) = Expr(1.0);
    return VectorField(chart, std::move(c));
}

VectorField VectorField::constant(const Chart& chart, std::span<const double> values) {
    return VectorField(chart, std::vector<Expr>(values.begin(), values.end()));
}

VectorField VectorField::simplified() const {
    std::vector<Expr> c;
    c.reserve(components_.size());
    for (const Expr& e : components_) c.push_back(simplify(e));
    return VectorField(chart_, std::move(c));
}

Expr VectorField::apply(const Expr& f) const {
    Expr sum(0.0);
    for (std::size_t a = 0; a < components_.size(); ++a) {
        sum = sum + components_[a] * differentiate(f, chart_.coordinate(a));
    }
    return simplify(sum);
}

std::string VectorField::str() const {
    std::string out;
    for (std::size_t a = 0; a < components_.size(); ++a) {
        const Expr c = simplify(components_[a]);
        if (c.is_const(0.0)) continue;
        std::string coef = c.kind() == Expr::Kind::Add ? "(" + to_string(c) + ")" : to_string(c);
        if (!out.empty() && coef.front() == '-') {
            out += " - " + coef.substr(1);
        } else {
            if (!out.empty()) out += " + ";
            out += coef;
        }
        out += " · d/d" + chart_.coordinate(a).name();
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// DifferentialForm

namespace {

// Sort in place and return the permutation sign, or 0 if an index repeats.
int sort_with_sign(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (idx[i] == idx[i - 1]) return 0;
    }
    return sign;
}

}  // namespace

DifferentialForm::DifferentialForm(Chart chart, int degree) : chart_(chart), degree_(degree) {
    if (degree < 0 || static_cast<std::size_t>(degree) > chart_.dim()) {
        throw std::invalid_argument("form degree " + std::to_string(degree) + " outside [0, " +
                                    std::to_string(chart_.dim()) + "]");
    }
}

DifferentialForm DifferentialForm::scalar(const Chart& chart, const Expr& f) {
    DifferentialForm w(chart, 0);
    w.add({}, f);
    return w;
}

DifferentialForm DifferentialForm::basis(const Chart& chart, std::size_t slot) {
    if (slot >= chart.dim()) throw std::out_of_range("basis slot out of range");
    DifferentialForm w(chart, 1);
    w.add({static_cast<int>(slot)}, Expr(1.0));
    return w;
}

void DifferentialForm::add(Index indices, const Expr& coef) {
    if (indices.size() != static_cast<std::size_t>(degree_)) {
        throw std::invalid_argument("index tuple length does not match form degree");
    }
    for (int i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= chart_.dim()) throw std::out_of_range("form index out of range");
    }
    if (coef.is_const(0.0)) return;
    const int sign = sort_with_sign(indices);
    if (sign == 0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(indices), Expr(0.0));
    it->second = it->second + (sign > 0 ? coef : -coef);
}

Expr DifferentialForm::coefficient(Index indices) const {
    if (indices.size() != static_cast<std::size_t>(degree_)) {
        throw std::invalid_argument("index tuple length does not match form degree");
    }
    const int sign = sort_with_sign(indices);
    if (sign == 0) return Expr(0.0);
    auto it = terms_.find(indices);
    if (it == terms_.end()) return Expr(0.0);
    return sign > 0 ? it->second : -it->second;
}

DifferentialForm DifferentialForm::simplified() const {
    DifferentialForm out(chart_, degree_);
    for (const auto& [idx, c] : terms_) {
        Expr s = simplify(c);
        if (!s.is_const(0.0)) out.terms_.emplace(idx, std::move(s));
    }
    return out;
}

bool DifferentialForm::is_structurally_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_const(0.0); });
}

ExprMatrix DifferentialForm::as_matrix() const {
    if (degree_ != 2) throw std::invalid_argument("as_matrix needs a 2-form");
    ExprMatrix m(chart_.dim(), chart_.dim());
    for (const auto& [idx, c] : terms_) {
        const auto i = static_cast<std::size_t>(idx[0]);
        const auto j = static_cast<std::size_t>(idx[1]);
        m(i, j) = c;
        m(j, i) = simplify(-c);
    }
    return m;
}

DifferentialForm DifferentialForm::operator+(const DifferentialForm& other) const {
    require_same_chart(chart_, other.chart_, "form sum");
    if (degree_ != other.degree_) throw std::invalid_argument("form sum: degree mismatch");
    DifferentialForm out = *this;
    for (const auto& [idx, c] : other.terms_) out.add(idx, c);
    return out;
}

DifferentialForm DifferentialForm::operator-() const { return scaled(Expr(-1.0)); }

DifferentialForm DifferentialForm::operator-(const DifferentialForm& other) const { return *this + (-other); }

DifferentialForm DifferentialForm::scaled(const Expr& factor) const {
    DifferentialForm out(chart_, degree_);
    for (const auto& [idx, c] : terms_) out.add(idx, factor * c);
    return out;
}

std::string DifferentialForm::str() const {
    std::string out;
    for (const auto& [idx, raw] : terms_) {
        const Expr c = simplify(raw);
        if (c.is_const(0.0)) continue;
        if (degree_ == 0) {
            if (!out.empty()) out += " + ";
            out += to_string(c);
            continue;
        }
        std::string coef = c.kind() == Expr::Kind::Add ? "(" + to_string(c) + ")" : to_string(c);
        if (!out.empty() && coef.front() == '-') {
            out += " - " + coef.substr(1);
        } else {
            if (!out.empty()) out += " + ";
            out += coef;
        }
        out += " · ";
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k) out += "^";
            out += "d" + chart_.coordinate(static_cast<std::size_t>(idx[k])).name();
        }
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// Metric and product structure

Metric Metric::from_matrix(const Chart& chart, const ExprMatrix& m) {
    const std::size_t d = chart.dim();
    if (m.rows() != d || m.cols() != d) throw DimensionMismatch("metric matrix must be 2n x 2n");
    std::vector<Expr> upper;
    upper.reserve(d * (d + 1) / 2);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            Expr ab = simplify(m(a, b));
            if (!ab.same(simplify(m(b, a)))) {
                throw std::invalid_argument("metric matrix is not symmetric at (" + std::to_string(a) + ", " +
                                            std::to_string(b) + ")");
            }
            upper.push_back(std::move(ab));
        }
    }
    return Metric(chart, std::move(upper));
}

std::size_t Metric::index(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    const std::size_t d = chart_.dim();
    return a * d - a * (a - 1) / 2 + (b - a);
}

const Expr& Metric::operator()(std::size_t a, std::size_t b) const { return upper_.at(index(a, b)); }

ExprMatrix Metric::matrix() const {
    const std::size_t d = chart_.dim();
    ExprMatrix m(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) m(a, b) = (*this)(a, b);
    }
    return m;
}

Matrix Metric::evaluate(std::span<const double> point) const { return matrix().evaluate(point); }

bool Metric::is_nondegenerate(int trials, std::uint64_t seed) const {
    const int d = static_cast<int>(chart_.dim());
    for (int t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        const auto p = sample_point(chart_.n(), rng);
        try {
            if (rank(evaluate(p)) < d) return false;
        } catch (const DomainError&) {
        }
    }
    return true;
}

ProductStructure::ProductStructure(Chart chart, ExprMatrix matrix, bool dual)
    : chart_(chart), matrix_(std::move(matrix)), dual_(dual) {
    if (matrix_.rows() != chart_.dim() || matrix_.cols() != chart_.dim()) {
        throw DimensionMismatch("product structure matrix must be 2n x 2n");
    }
}

Metric model_metric(const Chart& chart) {
    const std::size_t d = chart.dim();
    const auto n = static_cast<std::size_t>(chart.n());
    ExprMatrix m(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, n + i) = Expr(1.0);
        m(n + i, i) = Expr(1.0);
    }
    return Metric::from_matrix(chart, m);
}

ProductStructure model_product_structure(const Chart& chart) {
    const std::size_t d = chart.dim();
    ExprMatrix m(d, d);
    for (std::size_t a = 0; a < d; ++a) m(a, a) = Expr(chart.is_x(a) ? 1.0 : -1.0);
    return ProductStructure(chart, std::move(m));
}

Expr metric_apply(const Metric& g, const VectorField& X, const VectorField& Y) {
    require_same_chart(g.chart(), X.chart(), "metric_apply");
    require_same_chart(g.chart(), Y.chart(), "metric_apply");
    const std::size_t d = g.chart().dim();
    Expr sum(0.0);
    for (std::size_t a = 0; a < d; ++a) {
        if (X[a].is_const(0.0)) continue;
        for (std::size_t b = 0; b < d; ++b) sum = sum + g(a, b) * X[a] * Y[b];
    }
    return simplify(sum);
}

VectorField j_apply(const ProductStructure& J, const VectorField& X) {
    require_same_chart(J.chart(), X.chart(), "j_apply");
    const std::size_t d = J.chart().dim();
    std::vector<Expr> out(d);
    for (std::size_t a = 0; a < d; ++a) {
        Expr s(0.0);
        for (std::size_t b = 0; b < d; ++b) s = s + J(a, b) * X[b];
        out[a] = simplify(s);
    }
    return VectorField(J.chart(), std::move(out));
}

namespace {

// (α∘J)_b = α_a J^a_b
DifferentialForm compose_one_form(const ProductStructure& J, const DifferentialForm& alpha) {
    const std::size_t d = J.chart().dim();
    DifferentialForm out(J.chart(), 1);
    for (const auto& [idx, c] : alpha.terms()) {
        const auto a = static_cast<std::size_t>(idx[0]);
        for (std::size_t b = 0; b < d; ++b) {
            if (!J(a, b).is_const(0.0)) out.add({static_cast<int>(b)}, c * J(a, b));
        }
    }
    return out.simplified();
}

}  // namespace

DifferentialForm j_dual_apply(const ProductStructure& J, const DifferentialForm& alpha) {
    require_same_chart(J.chart(), alpha.chart(), "j_dual_apply");
    if (alpha.degree() != 1) throw std::invalid_argument("j_dual_apply acts on 1-forms");
    return compose_one_form(J, alpha);
}

// ---------------------------------------------------------------------------
// Exterior calculus

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_chart(a.chart(), b.chart(), "wedge");
    const int k = a.degree() + b.degree();
    if (static_cast<std::size_t>(k) > a.chart().dim()) {
        throw std::invalid_argument("wedge: degree " + std::to_string(k) + " exceeds dimension");
    }
    DifferentialForm out(a.chart(), k);
    for (const auto& [ia, ca] : a.terms()) {
        for (const auto& [ib, cb] : b.terms()) {
            DifferentialForm::Index idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            out.add(std::move(idx), ca * cb);
        }
    }
    return out.simplified();
}

DifferentialForm exterior_derivative(const DifferentialForm& omega) {
    const Chart& chart = omega.chart();
    if (static_cast<std::size_t>(omega.degree()) >= chart.dim()) {
        throw std::invalid_argument("exterior_derivative needs degree < 2n");
    }
    DifferentialForm out(chart, omega.degree() + 1);
    for (const auto& [idx, c] : omega.terms()) {
        for (std::size_t a = 0; a < chart.dim(); ++a) {
            Expr dc = differentiate(c, chart.coordinate(a));
            if (dc.is_const(0.0)) continue;
            DifferentialForm::Index full{static_cast<int>(a)};
            full.insert(full.end(), idx.begin(), idx.end());
            out.add(std::move(full), dc);
        }
    }
    return out.simplified();
}

DifferentialForm vertical_derivative(const Expr& f, const Chart& chart) {
    DifferentialForm out(chart, 1);
    for (std::size_t a = 0; a < chart.dim(); ++a) {
        Expr d = differentiate(f, chart.coordinate(a));
        out.add({static_cast<int>(a)}, chart.is_x(a) ? d : -d);
    }
    return out.simplified();
}

DifferentialForm insertion_operator(const ProductStructure& J, const DifferentialForm& omega) {
    require_same_chart(J.chart(), omega.chart(), "insertion_operator");
    const Chart& chart = omega.chart();
    switch (omega.degree()) {
        case 0:
            return DifferentialForm(chart, 0);
        case 1:
            return compose_one_form(J, omega);
        case 2: {
            const std::size_t d = chart.dim();
            const ExprMatrix w = omega.as_matrix();
            DifferentialForm out(chart, 2);
            for (std::size_t b = 0; b < d; ++b) {
                for (std::size_t c = b + 1; c < d; ++c) {
                    Expr s(0.0);
                    for (std::size_t a = 0; a < d; ++a) s = s + J(a, b) * w(a, c) + J(a, c) * w(b, a);
                    out.add({static_cast<int>(b), static_cast<int>(c)}, s);
                }
            }
            return out.simplified();
        }
        default:
            throw std::invalid_argument("insertion_operator supports degrees 0 to 2");
    }
}

DifferentialForm interior_product(const VectorField& X, const DifferentialForm& omega) {
    require_same_chart(X.chart(), omega.chart(), "interior_product");
    if (omega.degree() < 1) throw std::invalid_argument("interior_product needs degree >= 1");
    DifferentialForm out(omega.chart(), omega.degree() - 1);
    for (const auto& [idx, c] : omega.terms()) {
        for (std::size_t m = 0; m < idx.size(); ++m) {
            const Expr& xm = X[static_cast<std::size_t>(idx[m])];
            if (xm.is_const(0.0)) continue;
            DifferentialForm::Index rest = idx;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(m));
            out.add(std::move(rest), (m % 2 == 0) ? xm * c : -(xm * c));
        }
    }
    return out.simplified();
}

// ---------------------------------------------------------------------------
// Checks

bool is_almost_product(const ProductStructure& J, int trials, std::uint64_t seed) {
    const Chart& chart = J.chart();
    const std::size_t d = chart.dim();
    const Matrix id = Matrix::identity(d);
    bool plus_id = true;
    bool minus_id = true;
    for (int t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        const auto p = sample_point(chart.n(), rng);
        Matrix j;
        try {
            j = J.matrix().evaluate(p);
        } catch (const DomainError&) {
            continue;
        }
        if ((j * j - id).max_abs() > kEqualityTolerance) return false;
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                const double want = a == b ? 1.0 : 0.0;
                if (std::abs(j(a, b) - want) > kEqualityTolerance) plus_id = false;
                if (std::abs(j(a, b) + want) > kEqualityTolerance) minus_id = false;
            }
        }
    }
    return !plus_id && !minus_id;
}

double compatibility_violation(const Metric& g, const ProductStructure& J, int trials, std::uint64_t seed) {
    require_same_chart(g.chart(), J.chart(), "compatibility_check");
    const Chart& chart = g.chart();
    const std::size_t d = chart.dim();
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        Matrix X(d, 1);
        Matrix Y(d, 1);
        for (std::size_t a = 0; a < d; ++a) X(a, 0) = unit(rng);
        for (std::size_t a = 0; a < d; ++a) Y(a, 0) = unit(rng);
        for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
            const auto p = sample_point(chart.n(), rng);
            try {
                const Matrix G = g.evaluate(p);
                const Matrix Jp = J.matrix().evaluate(p);
                const double v = ((Jp * X).transpose() * G * Y)(0, 0) + (X.transpose() * G * (Jp * Y))(0, 0);
                worst = std::max(worst, std::abs(v));
                break;
            } catch (const DomainError&) {
                if (attempt == kMaxResamples) throw SamplingExhausted("metric undefined near sample points");
            }
        }
    }
    return worst;
}

bool compatibility_check(const Metric& g, const ProductStructure& J, int trials, std::uint64_t seed) {
    if (!is_almost_product(J, 20, seed)) return false;
    return close(compatibility_violation(g, J, trials, seed), 0.0);
}

}  // namespace pkmech
