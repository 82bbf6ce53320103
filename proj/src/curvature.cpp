#include "pkmech/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "pkmech/sampling.hpp"

namespace pkmech {

namespace {

bool all_closed(const Metric& g) {
    const std::size_t N = g.chart().dim();
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = a; b < N; ++b) {
            if (!is_closed(g(a, b))) return false;
        }
    }
    return true;
}

// Sample point at which f(point) does not throw DomainError.
template <class F>
auto at_valid_point(const Chart& chart, std::uint64_t seed, std::uint64_t stream, F&& f) {
    Rng rng(mix_seed(seed, stream));
    for (int attempt = 0;; ++attempt) {
        auto p = sample_point(chart.n(), rng);
        try {
            return f(p);
        } catch (const DomainError&) {
            if (attempt >= kMaxResamples) throw SamplingExhausted("no valid sample point found");
        } catch (const SingularMatrix&) {
            if (attempt >= kMaxResamples) throw SamplingExhausted("metric singular near every sample point");
        }
    }
}

void require_invertible_somewhere(const Metric& g) {
    const int N = static_cast<int>(g.chart().dim());
    for (std::uint64_t t = 0; t < 8; ++t) {
        try {
            if (at_valid_point(g.chart(), 0x51a7, t, [&](const std::vector<double>& p) { return rank(g.evaluate(p)); }) ==
                N) {
                return;
            }
        } catch (const SamplingExhausted&) {
        }
    }
    throw SingularMetric("metric is singular at every sample point");
}

// R_cdbv = g_va (d_c Γ^a_db - d_d Γ^a_cb + Γ^a_ce Γ^e_db - Γ^a_de Γ^e_cb)
std::vector<double> riemann_dense(std::size_t N, const Matrix& G, std::span<const double> gamma,
                                  std::span<const double> dgamma) {
    auto Gm = [&](std::size_t a, std::size_t b, std::size_t c) { return gamma[(a * N + b) * N + c]; };
    auto dG = [&](std::size_t e, std::size_t a, std::size_t b, std::size_t c) {
        return dgamma[((e * N + a) * N + b) * N + c];
    };
    std::vector<double> R(N * N * N * N, 0.0);
    std::vector<double> up(N);
    for (std::size_t c = 0; c < N; ++c) {
        for (std::size_t d = c + 1; d < N; ++d) {
            for (std::size_t b = 0; b < N; ++b) {
                for (std::size_t a = 0; a < N; ++a) {
                    double s = dG(c, a, d, b) - dG(d, a, c, b);
                    for (std::size_t e = 0; e < N; ++e) s += Gm(a, c, e) * Gm(e, d, b) - Gm(a, d, e) * Gm(e, c, b);
                    up[a] = s;
                }
                for (std::size_t v = 0; v < N; ++v) {
                    double s = 0.0;
                    for (std::size_t a = 0; a < N; ++a) s += G(v, a) * up[a];
                    R[((c * N + d) * N + b) * N + v] = s;
                    R[((d * N + c) * N + b) * N + v] = -s;
                }
            }
        }
    }
    return R;
}

}  // namespace

Metric metric_from_potential(const Expr& potential, const Chart& chart) {
    const std::size_t N = chart.dim();
    const auto n = static_cast<std::size_t>(chart.n());
    ExprMatrix m(N, N);
    for (std::size_t i = 0; i < n; ++i) {
        const Expr di = differentiate(potential, chart.coordinate(i));
        for (std::size_t j = 0; j < n; ++j) {
            const Expr h = simplify(differentiate(di, chart.coordinate(n + j)));
            m(i, n + j) = h;
            m(n + j, i) = h;
        }
    }
    return Metric::from_matrix(chart, m);
}

// ---------------------------------------------------------------------------
// ChristoffelSymbols

ChristoffelSymbols::ChristoffelSymbols(const Metric& g) : g_(g) {
    const Chart& chart = g.chart();
    const std::size_t N = chart.dim();
    std::vector<Expr> dg(N * N * N);
    for (std::size_t e = 0; e < N; ++e) {
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) dg[(e * N + a) * N + b] = simplify(differentiate(g(a, b), chart.coordinate(e)));
        }
    }
    auto dgm = [&](std::size_t e, std::size_t a, std::size_t b) -> const Expr& { return dg[(e * N + a) * N + b]; };

    const bool constant = all_closed(g);
    if (!constant && N > 4) {
        require_invertible_somewhere(g);
        dmetric_ = dg;
        ddmetric_.resize(N * N * N * N);
        for (std::size_t f = 0; f < N; ++f) {
            for (std::size_t i = 0; i < N * N * N; ++i) {
                ddmetric_[f * N * N * N + i] = simplify(differentiate(dg[i], chart.coordinate(f)));
            }
        }
        return;
    }

    ExprMatrix ginv(N, N);
    if (constant) {
        const std::vector<double> origin(N, 0.0);
        Matrix inv;
        try {
            inv = inverse(g.evaluate(origin), 1e-12);
        } catch (const SingularMatrix&) {
            throw SingularMetric("constant metric is singular");
        }
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) ginv(a, b) = Expr(inv(a, b));
        }
    } else {
        const ExprMatrix m = g.matrix();
        const Expr det = determinant(m);
        if (det.is_const(0.0)) throw SingularMetric("metric determinant vanishes identically");
        require_invertible_somewhere(g);
        const ExprMatrix adj = adjugate(m);
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) ginv(a, b) = simplify(adj(a, b) / det);
        }
    }

    symbols_.assign(N * N * N, Expr(0.0));
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) {
            for (std::size_t c = b; c < N; ++c) {
                Expr s(0.0);
                for (std::size_t d = 0; d < N; ++d) {
                    if (ginv(a, d).is_const(0.0)) continue;
                    const Expr bracket = dgm(b, d, c) + dgm(c, b, d) - dgm(d, b, c);
                    s = s + ginv(a, d) * bracket;
                }
                const Expr gamma = simplify(Expr(0.5) * s);
                symbols_[at(a, b, c)] = gamma;
                symbols_[at(a, c, b)] = gamma;
            }
        }
    }
}

std::size_t ChristoffelSymbols::at(std::size_t a, std::size_t b, std::size_t c) const {
    const std::size_t N = chart().dim();
    return (a * N + b) * N + c;
}

const Expr& ChristoffelSymbols::operator()(std::size_t a, std::size_t b, std::size_t c) const {
    if (!is_symbolic()) throw std::logic_error("Christoffel symbols are evaluated pointwise for this metric");
    return symbols_.at(at(a, b, c));
}

std::vector<double> ChristoffelSymbols::evaluate(std::span<const double> point) const {
    if (is_symbolic()) return evaluate_all(symbols_, point);
    const std::size_t N = chart().dim();
    const Matrix ginv = inverse(g_.evaluate(point));
    const auto dg = evaluate_all(dmetric_, point);
    auto dgm = [&](std::size_t e, std::size_t a, std::size_t b) { return dg[(e * N + a) * N + b]; };
    std::vector<double> out(N * N * N, 0.0);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) {
            for (std::size_t c = b; c < N; ++c) {
                double s = 0.0;
                for (std::size_t d = 0; d < N; ++d) s += ginv(a, d) * (dgm(b, d, c) + dgm(c, b, d) - dgm(d, b, c));
                out[at(a, b, c)] = 0.5 * s;
                out[at(a, c, b)] = 0.5 * s;
            }
        }
    }
    return out;
}

std::vector<double> ChristoffelSymbols::evaluate_derivatives(std::span<const double> point) const {
    const std::size_t N = chart().dim();
    const std::size_t N3 = N * N * N;
    std::vector<double> out(N * N3, 0.0);
    if (is_symbolic()) {
        for (std::size_t e = 0; e < N; ++e) {
            const Variable v = chart().coordinate(e);
            for (std::size_t i = 0; i < N3; ++i) out[e * N3 + i] = pkmech::evaluate(differentiate(symbols_[i], v), point);
        }
        return out;
    }
    const Matrix ginv = inverse(g_.evaluate(point));
    const auto dg = evaluate_all(dmetric_, point);
    const auto ddg = evaluate_all(ddmetric_, point);
    auto dgm = [&](std::size_t e, std::size_t a, std::size_t b) { return dg[(e * N + a) * N + b]; };
    auto ddgm = [&](std::size_t f, std::size_t e, std::size_t a, std::size_t b) {
        return ddg[f * N3 + (e * N + a) * N + b];
    };
    for (std::size_t e = 0; e < N; ++e) {
        // d_e g^{-1} = -g^{-1} (d_e g) g^{-1}
        Matrix dGe(N, N);
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) dGe(a, b) = dgm(e, a, b);
        }
        const Matrix dinv = Matrix(N, N) - ginv * dGe * ginv;
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) {
                for (std::size_t c = 0; c < N; ++c) {
                    double s = 0.0;
                    for (std::size_t d = 0; d < N; ++d) {
                        const double bracket = dgm(b, d, c) + dgm(c, b, d) - dgm(d, b, c);
                        const double dbracket = ddgm(e, b, d, c) + ddgm(e, c, b, d) - ddgm(e, d, b, c);
                        s += dinv(a, d) * bracket + ginv(a, d) * dbracket;
                    }
                    out[e * N3 + at(a, b, c)] = 0.5 * s;
                }
            }
        }
    }
    return out;
}

ChristoffelSymbols christoffel(const Metric& g) { return ChristoffelSymbols(g); }

// ---------------------------------------------------------------------------
// CurvatureTensor

CurvatureTensor CurvatureTensor::from_components(const Chart& chart, std::vector<Expr> components) {
    const std::size_t N = chart.dim();
    if (components.size() != N * N * N * N) throw DimensionMismatch("curvature tensor needs (2n)^4 components");
    return CurvatureTensor(chart, std::move(components), {});
}

CurvatureTensor CurvatureTensor::from_evaluator(const Chart& chart, PointEvaluator evaluator) {
    return CurvatureTensor(chart, {}, std::move(evaluator));
}

CurvatureTensor CurvatureTensor::zero(const Chart& chart) {
    const std::size_t N = chart.dim();
    return from_components(chart, std::vector<Expr>(N * N * N * N, Expr(0.0)));
}

const Expr& CurvatureTensor::operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    if (!is_symbolic()) throw std::logic_error("curvature tensor is evaluated pointwise");
    const std::size_t N = chart_.dim();
    return components_.at(((a * N + b) * N + c) * N + d);
}

std::vector<double> CurvatureTensor::evaluate(std::span<const double> point, Execution ex) const {
    if (is_symbolic()) return evaluate_all(components_, point, ex);
    return evaluator_(point);
}

double contract4(std::span<const double> dense, std::size_t N, std::span<const double> X, std::span<const double> Y,
                 std::span<const double> Z, std::span<const double> V) {
    double s = 0.0;
    for (std::size_t a = 0; a < N; ++a) {
        if (X[a] == 0.0) continue;
        for (std::size_t b = 0; b < N; ++b) {
            const double xy = X[a] * Y[b];
            if (xy == 0.0) continue;
            for (std::size_t c = 0; c < N; ++c) {
                const double xyz = xy * Z[c];
                if (xyz == 0.0) continue;
                for (std::size_t d = 0; d < N; ++d) s += xyz * V[d] * dense[((a * N + b) * N + c) * N + d];
            }
        }
    }
    return s;
}

double CurvatureTensor::apply(std::span<const double> point, std::span<const double> X, std::span<const double> Y,
                              std::span<const double> Z, std::span<const double> V) const {
    const std::size_t N = chart_.dim();
    if (X.size() != N || Y.size() != N || Z.size() != N || V.size() != N) {
        throw DimensionMismatch("curvature arguments must have 2n components");
    }
    return contract4(evaluate(point), N, X, Y, Z, V);
}

CurvatureTensor CurvatureTensor::scaled(double factor) const {
    if (is_symbolic()) {
        std::vector<Expr> c;
        c.reserve(components_.size());
        for (const Expr& e : components_) c.push_back(simplify(Expr(factor) * e));
        return from_components(chart_, std::move(c));
    }
    auto inner = evaluator_;
    return from_evaluator(chart_, [inner, factor](std::span<const double> p) {
        auto v = inner(p);
        for (double& x : v) x *= factor;
        return v;
    });
}

bool CurvatureTensor::is_structurally_zero() const {
    return is_symbolic() &&
           std::all_of(components_.begin(), components_.end(), [](const Expr& e) { return e.is_const(0.0); });
}

CurvatureTensor riemann(const Metric& g) { return riemann(g, christoffel(g)); }

CurvatureTensor riemann(const Metric& g, const ChristoffelSymbols& gamma) {
    const Chart& chart = g.chart();
    const std::size_t N = chart.dim();
    if (!gamma.is_symbolic()) {
        return CurvatureTensor::from_evaluator(chart, [g, gamma, N](std::span<const double> p) {
            return riemann_dense(N, g.evaluate(p), gamma.evaluate(p), gamma.evaluate_derivatives(p));
        });
    }
    std::vector<Expr> R(N * N * N * N, Expr(0.0));
    std::vector<Expr> up(N);
    for (std::size_t c = 0; c < N; ++c) {
        const Variable vc = chart.coordinate(c);
        for (std::size_t d = c + 1; d < N; ++d) {
            const Variable vd = chart.coordinate(d);
            for (std::size_t b = 0; b < N; ++b) {
                for (std::size_t a = 0; a < N; ++a) {
                    Expr s = differentiate(gamma(a, d, b), vc) - differentiate(gamma(a, c, b), vd);
                    for (std::size_t e = 0; e < N; ++e) {
                        s = s + gamma(a, c, e) * gamma(e, d, b) - gamma(a, d, e) * gamma(e, c, b);
                    }
                    up[a] = s;
                }
                for (std::size_t v = 0; v < N; ++v) {
                    Expr s(0.0);
                    for (std::size_t a = 0; a < N; ++a) s = s + g(v, a) * up[a];
                    s = simplify(s);
                    R[((c * N + d) * N + b) * N + v] = s;
                    R[((d * N + c) * N + b) * N + v] = simplify(-s);
                }
            }
        }
    }
    return CurvatureTensor::from_components(chart, std::move(R));
}

// ---------------------------------------------------------------------------
// Diagnostics

bool SymmetryReport::metric_identities_hold(double tol) const {
    return antisymmetry_first.max() < tol && antisymmetry_last.max() < tol && bianchi.max() < tol;
}

SymmetryReport symmetry_report(const CurvatureTensor& R, const ProductStructure& J, int trials, std::uint64_t seed,
                               Execution ex) {
    const Chart& chart = R.chart();
    const std::size_t N = chart.dim();
    std::vector<SymmetryReport> per_trial(static_cast<std::size_t>(std::max(trials, 0)));
    auto idx = [N](std::size_t a, std::size_t b, std::size_t c, std::size_t d) { return ((a * N + b) * N + c) * N + d; };

    for_each_index(per_trial.size(), ex, [&](std::size_t t) {
        SymmetryReport& rep = per_trial[t];
        const auto [p, dense, Jp] = at_valid_point(chart, seed, t, [&](const std::vector<double>& pt) {
            return std::make_tuple(pt, R.evaluate(pt), J.matrix().evaluate(pt));
        });
        auto upd = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };

        // R with the first two slots pushed through J, on the basis.
        std::vector<double> RJ(dense.size(), 0.0);
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) {
                for (std::size_t c = 0; c < N; ++c) {
                    for (std::size_t d = 0; d < N; ++d) {
                        double s = 0.0;
                        for (std::size_t e = 0; e < N; ++e) {
                            if (Jp(e, a) == 0.0) continue;
                            for (std::size_t f = 0; f < N; ++f) s += Jp(e, a) * Jp(f, b) * dense[idx(e, f, c, d)];
                        }
                        RJ[idx(a, b, c, d)] = s;
                    }
                }
            }
        }
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) {
                for (std::size_t c = 0; c < N; ++c) {
                    for (std::size_t d = 0; d < N; ++d) {
                        const double r = dense[idx(a, b, c, d)];
                        upd(rep.antisymmetry_first.basis, r + dense[idx(b, a, c, d)]);
                        upd(rep.antisymmetry_last.basis, r + dense[idx(a, b, d, c)]);
                        upd(rep.bianchi.basis, r + dense[idx(b, c, a, d)] + dense[idx(c, a, b, d)]);
                        upd(rep.j_identity.basis, RJ[idx(a, b, c, d)] + r);
                        upd(rep.j_identity_unsigned.basis, RJ[idx(a, b, c, d)] - r);
                    }
                }
            }
        }

        Rng rng(mix_seed(seed ^ 0x7e57ULL, t));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::vector<std::vector<double>> v(4, std::vector<double>(N));
        for (auto& vec : v) {
            for (double& c : vec) c = unit(rng);
        }
        const auto& X = v[0];
        const auto& Y = v[1];
        const auto& Z = v[2];
        const auto& V = v[3];
        std::vector<double> JX(N, 0.0);
        std::vector<double> JY(N, 0.0);
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = 0; b < N; ++b) {
                JX[a] += Jp(a, b) * X[b];
                JY[a] += Jp(a, b) * Y[b];
            }
        }
        auto Rv = [&](std::span<const double> A, std::span<const double> B, std::span<const double> C,
                      std::span<const double> D) { return contract4(dense, N, A, B, C, D); };
        const double r = Rv(X, Y, Z, V);
        upd(rep.antisymmetry_first.random, r + Rv(Y, X, Z, V));
        upd(rep.antisymmetry_last.random, r + Rv(X, Y, V, Z));
        upd(rep.bianchi.random, r + Rv(Y, Z, X, V) + Rv(Z, X, Y, V));
        const double rj = Rv(JX, JY, Z, V);
        upd(rep.j_identity.random, rj + r);
        upd(rep.j_identity_unsigned.random, rj - r);
    });

    SymmetryReport total;
    auto merge = [](IdentityViolation& into, const IdentityViolation& from) {
        into.basis = std::max(into.basis, from.basis);
        into.random = std::max(into.random, from.random);
    };
    for (const auto& rep : per_trial) {
        merge(total.antisymmetry_first, rep.antisymmetry_first);
        merge(total.antisymmetry_last, rep.antisymmetry_last);
        merge(total.bianchi, rep.bianchi);
        merge(total.j_identity, rep.j_identity);
        merge(total.j_identity_unsigned, rep.j_identity_unsigned);
    }
    return total;
}

double nabla_J(const Metric& g, const ProductStructure& J, int trials, std::uint64_t seed) {
    return nabla_J(christoffel(g), J, trials, seed);
}

double nabla_J(const ChristoffelSymbols& gamma, const ProductStructure& J, int trials, std::uint64_t seed) {
    const Chart& chart = gamma.chart();
    const std::size_t N = chart.dim();
    std::vector<Expr> dJ(N * N * N);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) {
            for (std::size_t c = 0; c < N; ++c) dJ[(a * N + b) * N + c] = simplify(differentiate(J(b, c), chart.coordinate(a)));
        }
    }
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        worst = std::max(worst, at_valid_point(chart, seed, static_cast<std::uint64_t>(t), [&](const std::vector<double>& p) {
            const auto G = gamma.evaluate(p);
            const auto dj = evaluate_all(dJ, p);
            const Matrix Jp = J.matrix().evaluate(p);
            auto Gm = [&](std::size_t a, std::size_t b, std::size_t c) { return G[(a * N + b) * N + c]; };
            double m = 0.0;
            for (std::size_t a = 0; a < N; ++a) {
                for (std::size_t b = 0; b < N; ++b) {
                    for (std::size_t c = 0; c < N; ++c) {
                        double s = dj[(a * N + b) * N + c];
                        for (std::size_t d = 0; d < N; ++d) s += Gm(b, a, d) * Jp(d, c) - Gm(d, a, c) * Jp(b, d);
                        m = std::max(m, std::abs(s));
                    }
                }
            }
            return m;
        }));
    }
    return worst;
}

CurvatureTensor r_zero(const Metric& g, const ProductStructure& J) {
    const Chart& chart = g.chart();
    const std::size_t N = chart.dim();
    // gj(a, c) = g(e_a, J e_c)
    ExprMatrix gj(N, N);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t c = 0; c < N; ++c) {
            Expr s(0.0);
            for (std::size_t e = 0; e < N; ++e) s = s + g(a, e) * J(e, c);
            gj(a, c) = simplify(s);
        }
    }
    std::vector<Expr> R(N * N * N * N);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) {
            for (std::size_t c = 0; c < N; ++c) {
                for (std::size_t d = 0; d < N; ++d) {
                    const Expr s = g(a, c) * g(b, d) - g(a, d) * g(b, c) - gj(a, c) * gj(b, d) + gj(a, d) * gj(b, c) -
                                   Expr(2.0) * gj(a, b) * gj(c, d);
                    R[((a * N + b) * N + c) * N + d] = simplify(Expr(0.25) * s);
                }
            }
        }
    }
    return CurvatureTensor::from_components(chart, std::move(R));
}

double sectional_curvature(const CurvatureTensor& R, const Metric& g, const SectionalPlane& plane) {
    const std::size_t N = g.chart().dim();
    if (plane.point.size() != N || plane.u.size() != N || plane.v.size() != N) {
        throw DimensionMismatch("sectional plane data must have 2n components");
    }
    const Matrix G = g.evaluate(plane.point);
    auto pair = [&](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) s += G(i, j) * a[i] * b[j];
        }
        return s;
    };
    const double guv = pair(plane.u, plane.v);
    const double den = pair(plane.u, plane.u) * pair(plane.v, plane.v) - guv * guv;
    if (std::abs(den) <= kDegeneracyThreshold) {
        throw DegeneratePlane("degenerate plane: g(u,u)g(v,v) - g(u,v)^2 = " + std::to_string(den));
    }
    return R.apply(plane.point, plane.u, plane.v, plane.u, plane.v) / den;
}

double j_sectional_curvature(const CurvatureTensor& R, const Metric& g, const ProductStructure& J,
                             std::span<const double> u, std::span<const double> point) {
    const std::size_t N = g.chart().dim();
    if (u.size() != N || point.size() != N) throw DimensionMismatch("vector and point must have 2n components");
    const Matrix G = g.evaluate(point);
    double guu = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) guu += G(i, j) * u[i] * u[j];
    }
    if (std::abs(guu) <= kIsotropyThreshold) throw IsotropicVector("isotropic vector: g(u,u) = " + std::to_string(guu));
    const Matrix Jp = J.matrix().evaluate(point);
    SectionalPlane plane{std::vector<double>(point.begin(), point.end()), std::vector<double>(u.begin(), u.end()),
                         std::vector<double>(N, 0.0)};
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) plane.v[a] += Jp(a, b) * u[b];
    }
    return sectional_curvature(R, g, plane);
}

SpaceFormFit constant_c_test(const CurvatureTensor& R, const CurvatureTensor& R0, int trials, std::uint64_t seed,
                             Execution ex) {
    const Chart& chart = R.chart();
    std::vector<std::pair<std::vector<double>, std::vector<double>>> samples(static_cast<std::size_t>(std::max(trials, 1)));
    for_each_index(samples.size(), ex, [&](std::size_t t) {
        samples[t] = at_valid_point(chart, seed, t, [&](const std::vector<double>& p) {
            return std::make_pair(R.evaluate(p), R0.evaluate(p));
        });
    });
    double max_r = 0.0;
    double num = 0.0;
    double den = 0.0;
    for (const auto& [r, r0] : samples) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            max_r = std::max(max_r, std::abs(r[i]));
            num += r[i] * r0[i];
            den += r0[i] * r0[i];
        }
    }
    if (max_r < kSpaceFormTolerance) return {0.0, max_r};
    if (den == 0.0) return {std::nullopt, max_r};
    const double c = num / den;
    double residual = 0.0;
    for (const auto& [r, r0] : samples) {
        for (std::size_t i = 0; i < r.size(); ++i) residual = std::max(residual, std::abs(r[i] - c * r0[i]));
    }
    if (residual < kSpaceFormTolerance) return {c, residual};
    return {std::nullopt, residual};
}

}  // namespace pkmech
