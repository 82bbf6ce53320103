#ifndef PKMECH_LINALG_HPP
#define PKMECH_LINALG_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pkmech/expr.hpp"

namespace pkmech {

class SingularMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transpose() const;
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
/// pivot falls below tol times the largest entry.
std::vector<double> solve(const Matrix& a, std::span<const double> b, double tol = 1e-12);
Matrix inverse(const Matrix& a, double tol = 1e-12);
/// Numerical rank by row echelon form with relative pivot threshold.
int rank(const Matrix& a, double tol = 1e-9);

/// Row-major matrix of expressions.
class ExprMatrix {
public:
    ExprMatrix() = default;
    ExprMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Expr(0.0)) {}

    static ExprMatrix identity(std::size_t n) {
        ExprMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Expr(1.0);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Expr& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const Expr> data() const { return data_; }

    Matrix evaluate(std::span<const double> point) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Expr> data_;
};

/// Cofactor expansion; intended for dimension <= 4.
Expr determinant(const ExprMatrix& m);
/// Transposed cofactor matrix, so that m * adjugate(m) = det(m) * Id.
ExprMatrix adjugate(const ExprMatrix& m);

}  // namespace pkmech

#endif  // PKMECH_LINALG_HPP
