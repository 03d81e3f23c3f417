#include "dpocs/linear_solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dpocs/dilation_search.hpp"
#include "dpocs/error.hpp"

namespace dpocs {

namespace {

double max_abs_residual(const LinearSystem& sys, std::span<const double> x) {
    double m = 0.0;
    for (std::size_t r = 0; r < sys.A.rows(); ++r)
        m = std::max(m, std::abs(row_dot(sys.A.row(r), x) - sys.y[r]));
    return m;
}

SolveReport make_report(const LinearSystem& sys, Vector x, std::string method) {
    const auto res = residual_report(sys, x);
    SolveReport rep{std::move(x), res.l2, res.linf, std::move(method), 0, 0, std::nullopt, std::nullopt};
    return rep;
}

SolveReport mmse_dense(const LinearSystem& sys, const MmseOptions& opts) {
    const auto K = static_cast<Eigen::Index>(sys.A.cols());
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
    for (std::size_t r = 0; r < sys.A.rows(); ++r) {
        const auto row = sys.A.row(r);
        for (std::size_t a = 0; a < row.cols.size(); ++a) {
            rhs(row.cols[a]) += row.values[a] * sys.y[r];
            for (std::size_t b = 0; b < row.cols.size(); ++b)
                normal(row.cols[a], row.cols[b]) += row.values[a] * row.values[b];
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > opts.max_condition)
        throw NumericalError("mmse_solve: A^T A is singular or ill-conditioned (condition " +
                             std::to_string(lmin > 0.0 ? lmax / lmin : INFINITY) + ")");
    const Eigen::VectorXd sol = normal.ldlt().solve(rhs);
    std::vector<double> x(sol.data(), sol.data() + sol.size());
    return make_report(sys, Vector(std::move(x)), "mmse");
}

// Conjugate gradient on A^T A x = A^T y without forming A^T A.
SolveReport mmse_cg(const LinearSystem& sys, const MmseOptions& opts) {
    const auto& A = sys.A;
    const std::size_t K = A.cols();
    const std::size_t max_iters = opts.cg_max_iters ? opts.cg_max_iters : 10 * K;

    std::vector<double> x(K, 0.0), r(K), p(K), q(K), Ap(A.rows());
    spmv_transpose(A, sys.y.span(), r);
    p = r;
    double rr = dot(r, r);
    const double stop = opts.cg_tol * opts.cg_tol * std::max(rr, std::numeric_limits<double>::min());
    std::size_t it = 0;
    for (; it < max_iters && rr > stop; ++it) {
        spmv(A, p, Ap);
        spmv_transpose(A, Ap, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) throw NumericalError("mmse_solve: A^T A is singular (CG breakdown)");
        const double alpha = rr / pq;
        for (std::size_t k = 0; k < K; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t k = 0; k < K; ++k) p[k] = r[k] + beta * p[k];
    }
    if (rr > stop) throw NumericalError("mmse_solve: CG did not converge; A^T A likely singular");
    auto rep = make_report(sys, Vector(std::move(x)), "mmse");
    rep.iterations = it;
    return rep;
}

}  // namespace

LinearSystem::LinearSystem(SparseMatrix A_, Vector y_) : A(std::move(A_)), y(std::move(y_)) {
    if (A.rows() != y.size())
        throw InvalidArgument("LinearSystem: A has " + std::to_string(A.rows()) +
                              " rows but y has " + std::to_string(y.size()) + " entries");
    if (A.rows() < A.cols())
        throw InvalidArgument("LinearSystem: fewer rows than columns");
    for (std::size_t r = 0; r < A.rows(); ++r)
        if (A.row(r).cols.empty())
            throw InvalidArgument("LinearSystem: row " + std::to_string(r) + " of A is zero");
}

ResidualReport residual_report(const LinearSystem& sys, const Vector& x) {
    if (x.size() != sys.A.cols())
        throw InvalidArgument("residual_report: x has " + std::to_string(x.size()) +
                              " entries, A has " + std::to_string(sys.A.cols()) + " columns");
    ResidualReport rep;
    rep.per_row.resize(sys.A.rows());
    for (std::size_t r = 0; r < sys.A.rows(); ++r)
        rep.per_row[r] = std::abs(sys.y[r] - row_dot(sys.A.row(r), x.span()));
    rep.l2 = norm2(rep.per_row);
    rep.linf = norm_inf(rep.per_row);
    return rep;
}

SolveReport mmse_solve(const LinearSystem& sys, const MmseOptions& opts) {
    if (sys.A.cols() <= opts.dense_max_cols) return mmse_dense(sys, opts);
    return mmse_cg(sys, opts);
}

SetList row_sets(const LinearSystem& sys, const Vector& rates) {
    if (rates.size() != sys.A.rows())
        throw InvalidArgument("row_sets: " + std::to_string(rates.size()) + " rates for " +
                              std::to_string(sys.A.rows()) + " rows");
    SetList sets;
    sets.reserve(sys.A.rows());
    std::vector<double> dense(sys.A.cols());
    for (std::size_t r = 0; r < sys.A.rows(); ++r) {
        std::fill(dense.begin(), dense.end(), 0.0);
        const auto row = sys.A.row(r);
        for (std::size_t k = 0; k < row.cols.size(); ++k) dense[row.cols[k]] = row.values[k];
        sets.push_back(std::make_shared<AffineSet>(Vector(dense), sys.y[r], rates[r]));
    }
    return sets;
}

Vector row_norm_rates(const SparseMatrix& A) {
    auto sq = A.row_norms_sq();
    for (double& v : sq) v = std::sqrt(v);
    return Vector(std::move(sq));
}

SolveReport minimax_solve(const LinearSystem& sys, const Vector& rates,
                          std::optional<double> bracket_tol, const PocsOptions& probe) {
    DilationProblem problem{row_sets(sys, rates), Vector(sys.A.cols(), 0.0), probe};
    auto result = interval_halving(problem, bracket_tol);

    auto rep = make_report(sys, std::move(result.x_star), "minimax");
    rep.epsilon_star = result.epsilon_star;
    rep.probes = result.probes;
    rep.iterations = result.bracket_history.size();
    const auto res = residual_report(sys, rep.x);
    double weighted = 0.0;
    for (std::size_t r = 0; r < rates.size(); ++r)
        if (rates[r] > 0.0) weighted = std::max(weighted, res.per_row[r] / rates[r]);
    rep.weighted_residual_linf = weighted;
    return rep;
}

ChebyshevSolution chebyshev_oracle(const LinearSystem& sys) {
    const std::size_t K = sys.A.cols();
    if (K > 3) throw InvalidArgument("chebyshev_oracle: at most 3 unknowns");

    const auto mmse = mmse_solve(sys);
    if (mmse.residual_linf == 0.0) return {mmse.x, 0.0};

    // The objective is Lipschitz with constant max_l ||r_l||, so the grid
    // point nearest the minimizer scores at most best + lip * diag / 2. The
    // next level covers the bounding box of all such points, which keeps long
    // narrow valleys inside the search window. When that box barely shrinks
    // (very flat valleys) the window is halved around the best point instead.
    double lip = 0.0;
    for (std::size_t r = 0; r < sys.A.rows(); ++r) {
        double s = 0.0;
        for (double v : sys.A.row(r).values) s += v * v;
        lip = std::max(lip, std::sqrt(s));
    }

    const std::size_t grid = K == 1 ? 401 : (K == 2 ? 201 : 41);
    const double half = 10.0 * mmse.residual_linf;
    std::vector<double> lo(K), hi(K), cell(K);
    for (std::size_t k = 0; k < K; ++k) {
        lo[k] = mmse.x[k] - half;
        hi[k] = mmse.x[k] + half;
    }
    std::vector<double> best(mmse.x.begin(), mmse.x.end());
    double best_val = max_abs_residual(sys, best);

    std::vector<double> point(K);
    std::vector<std::size_t> idx(K);
    std::vector<std::pair<std::vector<double>, double>> samples;
    for (int level = 0; level < 200; ++level) {
        double diag = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            cell[k] = (hi[k] - lo[k]) / static_cast<double>(grid - 1);
            diag += cell[k] * cell[k];
        }
        diag = std::sqrt(diag);
        samples.clear();
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (std::size_t k = 0; k < K; ++k) point[k] = lo[k] + cell[k] * static_cast<double>(idx[k]);
            const double v = max_abs_residual(sys, point);
            samples.emplace_back(point, v);
            if (v < best_val) {
                best_val = v;
                best = point;
            }
            std::size_t k = 0;
            while (k < K && ++idx[k] == grid) idx[k++] = 0;
            if (k == K) break;
        }
        if (*std::max_element(cell.begin(), cell.end()) < 1e-6) break;

        const double threshold = best_val + 0.5 * lip * diag;
        std::vector<double> nlo(best), nhi(best);
        for (const auto& [p, v] : samples) {
            if (v > threshold) continue;
            for (std::size_t k = 0; k < K; ++k) {
                nlo[k] = std::min(nlo[k], p[k]);
                nhi[k] = std::max(nhi[k], p[k]);
            }
        }
        bool shrinks = true;
        for (std::size_t k = 0; k < K; ++k)
            shrinks = shrinks && nhi[k] - nlo[k] + 2.0 * cell[k] <= 0.75 * (hi[k] - lo[k]);
        for (std::size_t k = 0; k < K; ++k) {
            const double h = 0.4 * (hi[k] - lo[k]);
            lo[k] = shrinks ? nlo[k] - cell[k] : best[k] - h;
            hi[k] = shrinks ? nhi[k] + cell[k] : best[k] + h;
        }
    }
    return {Vector(std::move(best)), best_val};
}

}  // namespace dpocs
