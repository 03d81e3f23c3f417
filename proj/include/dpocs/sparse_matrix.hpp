#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpocs/vector.hpp"

namespace dpocs {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored. Instances are immutable once built.
class SparseMatrix {
public:
    /// Builds from unordered triplets; duplicates are summed and entries that
    /// sum to exactly zero are dropped.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);

    /// Builds from raw CSR arrays, validating every structural invariant.
    static SparseMatrix from_csr(std::size_t rows, std::size_t cols,
                                 std::vector<std::size_t> row_ptr,
                                 std::vector<std::size_t> col_idx,
                                 std::vector<double> values);

    static SparseMatrix identity(std::size_t n);

    /// Row-major dense input; zeros are not stored.
    static SparseMatrix from_dense(std::size_t rows, std::size_t cols,
                                   std::span<const double> row_major);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    struct RowView {
        std::span<const std::size_t> cols;
        std::span<const double> values;
    };
    RowView row(std::size_t r) const noexcept {
        const auto b = row_ptr_[r];
        const auto e = row_ptr_[r + 1];
        return {std::span(col_idx_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
    }

    std::vector<Triplet> triplets() const;
    std::vector<double> to_dense() const;

    /// Squared Euclidean norm of every row.
    std::vector<double> row_norms_sq() const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    SparseMatrix() = default;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// r . x for a sparse row.
inline double row_dot(const SparseMatrix::RowView& row, std::span<const double> x) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < row.cols.size(); ++k) s += row.values[k] * x[row.cols[k]];
    return s;
}

/// out = A x. `out` must have A.rows() entries.
void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> out);
/// out = A^T v. `out` must have A.cols() entries.
void spmv_transpose(const SparseMatrix& A, std::span<const double> v, std::span<double> out);

Vector spmv(const SparseMatrix& A, const Vector& x);
Vector spmv_transpose(const SparseMatrix& A, const Vector& v);

}  // namespace dpocs
