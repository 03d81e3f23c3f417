#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dpocs/convex_sets.hpp"
#include "dpocs/pocs.hpp"
#include "dpocs/sparse_matrix.hpp"
#include "dpocs/vector.hpp"

namespace dpocs {

/// Overdetermined system y = A x with at least as many rows as columns and
/// no zero rows.
struct LinearSystem {
    LinearSystem(SparseMatrix A, Vector y);

    SparseMatrix A;
    Vector y;
};

struct ResidualReport {
    double l2 = 0.0;
    double linf = 0.0;
    /// |y_l - r_l . x| for every row.
    std::vector<double> per_row;
};

ResidualReport residual_report(const LinearSystem& sys, const Vector& x);

struct SolveReport {
    Vector x;
    double residual_l2 = 0.0;
    double residual_linf = 0.0;
    std::string method;
    std::size_t iterations = 0;
    std::size_t probes = 0;
    /// Minimax only.
    std::optional<double> epsilon_star;
    /// Minimax only: max over rows with positive rate of |residual| / rate.
    std::optional<double> weighted_residual_linf;
};

struct MmseOptions {
    /// Above this many columns the normal equations are solved by CG.
    std::size_t dense_max_cols = 256;
    /// Largest accepted condition number of A^T A (dense path).
    double max_condition = 1e12;
    double cg_tol = 1e-10;
    /// 0 means 10 * cols.
    std::size_t cg_max_iters = 0;
};

/// Least-squares solution x = (A^T A)^-1 A^T y. Throws NumericalError when
/// A^T A is singular or too ill-conditioned.
SolveReport mmse_solve(const LinearSystem& sys, const MmseOptions& opts = {});

/// One affine set per row, with the given dilation rates.
SetList row_sets(const LinearSystem& sys, const Vector& rates);

/// Rates equal to the row norms, which turns residual-unit dilation into
/// Euclidean distance to each row's hyperplane.
Vector row_norm_rates(const SparseMatrix& A);

/// Minimax solution min_x max_l |y_l - r_l . x| / rate_l found by dilated
/// POCS over the row hyperplanes. Rows with zero rate are hard constraints.
/// The search starts from the origin.
SolveReport minimax_solve(const LinearSystem& sys, const Vector& rates,
                          std::optional<double> bracket_tol = std::nullopt,
                          const PocsOptions& probe = {});

struct ChebyshevSolution {
    Vector x;
    double epsilon;
};

/// Brute-force minimax by coarse-to-fine grid search, for at most three
/// unknowns. The search box is centred on the least-squares solution with
/// half-width ten times its largest residual. Each level shrinks the box to
/// the grid points that could still neighbour the minimizer; refinement stops
/// once the grid spacing drops below 1e-6 (or after 200 levels when the
/// minimizer is not unique).
ChebyshevSolution chebyshev_oracle(const LinearSystem& sys);

}  // namespace dpocs
