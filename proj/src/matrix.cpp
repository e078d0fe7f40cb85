#include "rnet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace rnet {

namespace {

void require_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidInput("matrix entry is not finite");
    }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(fmt::format("shape {}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw DimensionMismatch(fmt::format("{} entries for a {}x{} matrix", entries_.size(), rows_, cols_));
    require_finite(entries_);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
    require_finite(entries_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    require_finite(d);
    return m;
}

DenseMatrix DenseMatrix::column(std::span<const double> v) {
    return DenseMatrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

std::vector<double> DenseMatrix::column_values(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::abs(v));
    return m;
}

double DenseMatrix::norm_inf() const {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (double v : row(r)) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
    DenseMatrix b(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
    return b;
}

DenseMatrix DenseMatrix::select(std::span<const std::size_t> row_idx,
                                std::span<const std::size_t> col_idx) const {
    DenseMatrix s(row_idx.size(), col_idx.size());
    for (std::size_t r = 0; r < row_idx.size(); ++r) {
        if (row_idx[r] >= rows_) throw DimensionMismatch("row index out of range");
        for (std::size_t c = 0; c < col_idx.size(); ++c) {
            if (col_idx[c] >= cols_) throw DimensionMismatch("column index out of range");
            s(r, c) = (*this)(row_idx[r], col_idx[c]);
        }
    }
    return s;
}

DenseMatrix DenseMatrix::permuted(std::span<const std::size_t> perm) const {
    if (!square() || perm.size() != rows_) throw DimensionMismatch("permutation size");
    return select(perm, perm);
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (double& v : entries_) v *= s;
    return *this;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_)
        throw DimensionMismatch(fmt::format("product {}x{} * {}x{}", a.rows_, a.cols_, b.rows_, b.cols_));
    DenseMatrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t l = 0; l < a.cols_; ++l) {
            const double ail = a(i, l);
            if (ail == 0.0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += ail * b(l, j);
        }
    }
    return p;
}

std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector size");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    return m;
}

LuDecomposition::LuDecomposition(const DenseMatrix& a) : lu_(a), perm_(a.rows()) {
    if (!a.square()) throw DimensionMismatch("LU of a non-square matrix");
    const std::size_t n = a.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double floor = kPivotFloor * a.max_abs();

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(lu_(r, k)) > std::abs(lu_(p, k))) p = r;
        if (!(std::abs(lu_(p, k)) > floor))
            throw SingularMatrix(fmt::format("pivot {:.3g} at column {} below floor {:.3g}", lu_(p, k), k, floor));
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
            std::swap(perm_[k], perm_[p]);
        }
        const double pivot = lu_(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = lu_(r, k) / pivot;
            lu_(r, k) = f;
            if (f == 0.0) continue;
            for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
        }
    }
}

std::vector<double> LuDecomposition::solve(std::span<const double> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw DimensionMismatch("right-hand side size");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

DenseMatrix LuDecomposition::solve(const DenseMatrix& b) const {
    if (b.rows() != size()) throw DimensionMismatch("right-hand side rows");
    DenseMatrix x(b.rows(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        auto col = solve(b.column_values(c));
        for (std::size_t r = 0; r < col.size(); ++r) x(r, c) = col[r];
    }
    return x;
}

DenseMatrix solve_linear_system(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.square()) throw DimensionMismatch("solve: coefficient matrix not square");
    if (b.rows() != a.rows()) throw DimensionMismatch("solve: right-hand side rows");
    return LuDecomposition(a).solve(b);
}

DenseMatrix invert(const DenseMatrix& a) {
    return solve_linear_system(a, DenseMatrix::identity(a.rows()));
}

DenseMatrix schur_complement(const DenseMatrix& m, std::span<const std::size_t> keep,
                             std::span<const std::size_t> eliminate) {
    if (!m.square()) throw DimensionMismatch("schur: matrix not square");
    std::vector<bool> seen(m.rows(), false);
    for (auto idx : {keep, eliminate}) {
        for (std::size_t i : idx) {
            if (i >= m.rows() || seen[i]) throw InvalidInput("schur: index sets do not partition the matrix");
            seen[i] = true;
        }
    }
    if (keep.size() + eliminate.size() != m.rows())
        throw InvalidInput("schur: index sets do not partition the matrix");

    DenseMatrix kk = m.select(keep, keep);
    if (eliminate.empty()) return kk;
    const DenseMatrix ke = m.select(keep, eliminate);
    const DenseMatrix ek = m.select(eliminate, keep);
    const DenseMatrix ee = m.select(eliminate, eliminate);
    return kk - ke * LuDecomposition(ee).solve(ek);
}

DenseMatrix symmetrize_average(const DenseMatrix& m) {
    if (!m.square()) throw DimensionMismatch("symmetrize: matrix not square");
    DenseMatrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s(i, i) = m(i, i);
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

double condition_estimate(const DenseMatrix& a) {
    if (!a.square()) throw DimensionMismatch("condition: matrix not square");
    if (a.empty()) return 1.0;
    try {
        return a.norm_inf() * invert(a).norm_inf();
    } catch (const SingularMatrix&) {
        return std::numeric_limits<double>::infinity();
    } catch (const InvalidInput&) {
        // inverse overflowed to inf
        return std::numeric_limits<double>::infinity();
    }
}

double asymmetry(const DenseMatrix& m) {
    if (!m.square()) throw DimensionMismatch("asymmetry: matrix not square");
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    return worst;
}

std::string to_csv(const DenseMatrix& m) {
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += fmt::format("{:.17g}", m(r, c));
        }
        out += '\n';
    }
    return out;
}

DenseMatrix matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t count = 0;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw InvalidInput(fmt::format("csv row {}: bad number '{}'", rows + 1, cell));
            }
            if (cell.find_first_not_of(" \t", used) != std::string::npos)
                throw InvalidInput(fmt::format("csv row {}: bad number '{}'", rows + 1, cell));
            values.push_back(v);
            ++count;
        }
        if (rows == 0) cols = count;
        else if (count != cols) throw InvalidInput(fmt::format("csv row {} has {} cells, expected {}", rows + 1, count, cols));
        ++rows;
    }
    return DenseMatrix(rows, cols, std::move(values));
}

std::ostream& operator<<(std::ostream& os, const DenseMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << (r ? " [" : "[[");
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << m(r, c);
        os << (r + 1 == m.rows() ? "]]" : "]\n");
    }
    return os;
}

}  // namespace rnet
