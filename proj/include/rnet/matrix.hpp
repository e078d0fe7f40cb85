#pragma once

// Small dense real-matrix kernel used by the forward model and the inverse
// solver. Matrices are row-major values; every transform returns a new matrix.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rnet/errors.hpp"

namespace rnet {

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);
    static DenseMatrix column(std::span<const double> v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return entries_.empty(); }

    double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

    std::span<const double> entries() const { return entries_; }
    std::span<const double> row(std::size_t r) const {
        return {entries_.data() + r * cols_, cols_};
    }
    std::vector<double> column_values(std::size_t c) const;

    /// Largest absolute entry (0 for an empty matrix).
    double max_abs() const;
    /// Induced infinity norm: max absolute row sum.
    double norm_inf() const;

    DenseMatrix transpose() const;
    DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    DenseMatrix select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;
    /// Conjugation by a permutation: result(i, j) = m(perm[i], perm[j]).
    DenseMatrix permuted(std::span<const std::size_t> perm) const;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double s);

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
    friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }
    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// LU factorization with partial (row) pivoting. Throws SingularMatrix when a
/// pivot falls below 1e-14 times the largest entry of the input.
class LuDecomposition {
public:
    static constexpr double kPivotFloor = 1e-14;

    explicit LuDecomposition(const DenseMatrix& a);

    std::size_t size() const { return lu_.rows(); }
    DenseMatrix solve(const DenseMatrix& b) const;
    std::vector<double> solve(std::span<const double> b) const;

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

DenseMatrix solve_linear_system(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix invert(const DenseMatrix& a);

/// m_kk - m_ke * m_ee^{-1} * m_ek. `keep` and `eliminate` must partition the
/// index range of the square matrix m.
DenseMatrix schur_complement(const DenseMatrix& m, std::span<const std::size_t> keep,
                             std::span<const std::size_t> eliminate);

DenseMatrix symmetrize_average(const DenseMatrix& m);

/// Infinity-norm condition number ||a|| * ||a^{-1}||; +inf when a is singular.
double condition_estimate(const DenseMatrix& a);

/// Largest |m(i,j) - m(j,i)|.
double asymmetry(const DenseMatrix& m);

// CSV exchange: one row per line, comma separated, 17 significant digits.
std::string to_csv(const DenseMatrix& m);
DenseMatrix matrix_from_csv(const std::string& text);

std::ostream& operator<<(std::ostream& os, const DenseMatrix& m);

}  // namespace rnet
