#pragma once

#include <cstddef>
#include <vector>

#include "dpocs/convex_sets.hpp"
#include "dpocs/vector.hpp"

namespace dpocs {

enum class PocsStatus { Converged, LimitCycle, IterationBudgetExhausted };

const char* to_string(PocsStatus status) noexcept;

struct PocsOptions {
    std::size_t max_iters = 10'000;
    /// Full-cycle displacement threshold, relative to max(1, ||x||).
    double step_tol = 1e-8;
    /// Largest admissible set violation for a converged iterate.
    double residual_tol = 1e-9;
    /// Number of consecutive stagnant cycles that signal a limit cycle.
    std::size_t stagnation_window = 10;
    bool record_trace = false;
    /// Keep every k-th iterate in the trace; 0 picks 1 up to dimension 1000, else 10.
    std::size_t trace_stride = 0;

    void validate() const;
};

/// Iterate history. Entry q describes x[q]; entry 0 is the starting point.
struct PocsTrace {
    std::vector<double> residual_max;
    /// ||x[q] - x[q-1]||, zero for q = 0.
    std::vector<double> displacement;
    std::vector<double> iterate_norm;
    /// Thinned iterates (only when record_trace) and their cycle indices.
    std::vector<std::size_t> iterate_index;
    std::vector<Vector> iterates;

    std::size_t size() const noexcept { return residual_max.size(); }
    void push(const Vector& x, double residual, double displacement, bool keep_iterate);
};

struct PocsOutcome {
    PocsStatus status;
    Vector x_final;
    PocsTrace trace;
    std::size_t iterations = 0;
};

/// x[q+1] = P_I ... P_2 P_1 x[q], projecting onto each set dilated by
/// rate_i * eps. Sets are applied in list order.
PocsOutcome alternating_pocs(const SetList& sets, const Vector& x0, double eps,
                             const PocsOptions& opts = {});

/// x[q+1] = sum_i w_i P_i x[q]. Weights must be non-negative and sum to one;
/// they are never renormalized. Converged means the fixed point was reached
/// (displacement below step_tol); the residual may stay positive when the sets
/// do not intersect.
PocsOutcome simultaneous_pocs(const SetList& sets, const Vector& weights, const Vector& x0,
                              const PocsOptions& opts = {});

/// Converged iff the last residual is within residual_tol; LimitCycle iff the
/// last `stagnation_window` displacements are below step_tol (relative) and
/// the residual has stopped changing while still above residual_tol;
/// otherwise the budget ran out.
PocsStatus classify_outcome(const PocsTrace& trace, const PocsOptions& opts);

}  // namespace dpocs
