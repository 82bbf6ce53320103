#include "pkmech/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pkmech {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix difference: shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> solve(const Matrix& a, std::span<const double> b, double tol) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve: shape mismatch");
    Matrix m = a;
    std::vector<double> x(b.begin(), b.end());
    const double scale = std::max(m.max_abs(), 1e-300);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        }
        if (std::abs(m(piv, col)) <= tol * scale) throw SingularMatrix("singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            std::swap(x[piv], x[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
            x[r] -= f * x[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

Matrix inverse(const Matrix& a, double tol) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    std::vector<double> e(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const auto col = solve(a, e, tol);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

int rank(const Matrix& a, double tol) {
    Matrix m = a;
    const double scale = m.max_abs();
    if (scale == 0.0) return 0;
    int r = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        for (std::size_t i = row + 1; i < m.rows(); ++i) {
            if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
        }
        if (std::abs(m(piv, col)) <= tol * scale) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
        for (std::size_t i = row + 1; i < m.rows(); ++i) {
            const double f = m(i, col) / m(row, col);
            for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        ++row;
        ++r;
    }
    return r;
}

Matrix ExprMatrix::evaluate(std::span<const double> point) const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = pkmech::evaluate((*this)(i, j), point);
    }
    return m;
}

namespace {

ExprMatrix minor_of(const ExprMatrix& m, std::size_t skip_row, std::size_t skip_col) {
    ExprMatrix out(m.rows() - 1, m.cols() - 1);
    for (std::size_t i = 0, oi = 0; i < m.rows(); ++i) {
        if (i == skip_row) continue;
        for (std::size_t j = 0, oj = 0; j < m.cols(); ++j) {
            if (j == skip_col) continue;
            out(oi, oj++) = m(i, j);
        }
        ++oi;
    }
    return out;
}

}  // namespace

Expr determinant(const ExprMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return Expr(1.0);
    if (n == 1) return m(0, 0);
    if (n == 2) return simplify(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    Expr det(0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (m(0, j).is_const(0.0)) continue;
        Expr term = m(0, j) * determinant(minor_of(m, 0, j));
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return simplify(det);
}

ExprMatrix adjugate(const ExprMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("adjugate of non-square matrix");
    const std::size_t n = m.rows();
    ExprMatrix adj(n, n);
    if (n == 1) {
        adj(0, 0) = Expr(1.0);
        return adj;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Expr c = determinant(minor_of(m, i, j));
            adj(j, i) = ((i + j) % 2 == 0) ? c : simplify(-c);
        }
    }
    return adj;
}

}  // namespace pkmech
