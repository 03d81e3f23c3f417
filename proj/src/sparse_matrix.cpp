#include "dpocs/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpocs/error.hpp"

namespace dpocs {

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw InvalidArgument("SparseMatrix: empty shape");
}

}  // namespace

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
    check_shape(rows, cols);
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols)
            throw InvalidArgument("SparseMatrix: triplet (" + std::to_string(t.row) + ", " +
                                  std::to_string(t.col) + ") outside " + std::to_string(rows) +
                                  "x" + std::to_string(cols));
        if (!std::isfinite(t.value)) throw InvalidArgument("SparseMatrix: non-finite value");
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(rows + 1, 0);
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());

    std::size_t i = 0;
    while (i < triplets.size()) {
        const auto r = triplets[i].row;
        const auto c = triplets[i].col;
        double sum = 0.0;
        for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i)
            sum += triplets[i].value;
        if (sum == 0.0) continue;
        m.col_idx_.push_back(c);
        m.values_.push_back(sum);
        ++m.row_ptr_[r + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
}

SparseMatrix SparseMatrix::from_csr(std::size_t rows, std::size_t cols,
                                    std::vector<std::size_t> row_ptr,
                                    std::vector<std::size_t> col_idx,
                                    std::vector<double> values) {
    check_shape(rows, cols);
    if (row_ptr.size() != rows + 1 || row_ptr.front() != 0)
        throw InvalidArgument("SparseMatrix: row_ptr must have rows+1 entries starting at 0");
    if (col_idx.size() != values.size() || row_ptr.back() != values.size())
        throw InvalidArgument("SparseMatrix: inconsistent CSR array lengths");
    for (std::size_t r = 0; r < rows; ++r) {
        if (row_ptr[r + 1] < row_ptr[r])
            throw InvalidArgument("SparseMatrix: row_ptr not monotone at row " + std::to_string(r));
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            if (col_idx[k] >= cols)
                throw InvalidArgument("SparseMatrix: column index out of range in row " +
                                      std::to_string(r));
            if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
                throw InvalidArgument("SparseMatrix: column indices not increasing in row " +
                                      std::to_string(r));
            if (values[k] == 0.0 || !std::isfinite(values[k]))
                throw InvalidArgument("SparseMatrix: stored zero or non-finite value in row " +
                                      std::to_string(r));
        }
    }
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.values_ = std::move(values);
    return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols,
                                      std::span<const double> row_major) {
    if (row_major.size() != rows * cols)
        throw InvalidArgument("SparseMatrix: dense data has " + std::to_string(row_major.size()) +
                              " entries, expected " + std::to_string(rows * cols));
    std::vector<Triplet> t;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (row_major[r * cols + c] != 0.0) t.push_back({r, c, row_major[r * cols + c]});
    return from_triplets(rows, cols, std::move(t));
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            out.push_back({r, col_idx_[k], values_[k]});
    return out;
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> d(rows_ * cols_, 0.0);
    for (const auto& t : triplets()) d[t.row * cols_ + t.col] = t.value;
    return d;
}

std::vector<double> SparseMatrix::row_norms_sq() const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            out[r] += values_[k] * values_[k];
    return out;
}

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> out) {
    if (x.size() != A.cols() || out.size() != A.rows())
        throw InvalidArgument("spmv: dimension mismatch (" + std::to_string(A.rows()) + "x" +
                              std::to_string(A.cols()) + " times " + std::to_string(x.size()) +
                              ")");
    for (std::size_t r = 0; r < A.rows(); ++r) out[r] = row_dot(A.row(r), x);
}

void spmv_transpose(const SparseMatrix& A, std::span<const double> v, std::span<double> out) {
    if (v.size() != A.rows() || out.size() != A.cols())
        throw InvalidArgument("spmv_transpose: dimension mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < A.rows(); ++r) {
        const auto row = A.row(r);
        for (std::size_t k = 0; k < row.cols.size(); ++k) out[row.cols[k]] += row.values[k] * v[r];
    }
}

Vector spmv(const SparseMatrix& A, const Vector& x) {
    std::vector<double> out(A.rows());
    spmv(A, x.span(), out);
    return Vector(std::move(out));
}

Vector spmv_transpose(const SparseMatrix& A, const Vector& v) {
    std::vector<double> out(A.cols());
    spmv_transpose(A, v.span(), out);
    return Vector(std::move(out));
}

}  // namespace dpocs
