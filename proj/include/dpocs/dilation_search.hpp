#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dpocs/convex_sets.hpp"
#include "dpocs/pocs.hpp"
#include "dpocs/vector.hpp"

namespace dpocs {

struct DilationProblem {
    SetList sets;
    Vector x0;
    PocsOptions probe;
    /// Cap on bracket doublings; some dilated families only meet in the limit.
    std::size_t max_doublings = 60;
};

struct ProbeResult {
    bool feasible = false;
    /// Final iterate; a valid witness when `feasible`.
    std::optional<Vector> x;
    PocsStatus status = PocsStatus::IterationBudgetExhausted;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Feasibility of the dilated sets at `eps`, decided by alternating POCS.
/// A run that exhausts its budget while still settling first tries a jump to
/// the extrapolated limit of its geometric tail (kept only if POCS from there
/// converges), then is retried once from its last iterate with the same jump
/// attempted afterwards; if it is still undecided the final iterate is
/// accepted when its largest violation is within twice residual_tol.
ProbeResult feasibility_probe(const SetList& sets, double eps, const Vector& x0,
                              const PocsOptions& opts);

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    /// Feasible point at `hi`.
    Vector witness;
    std::size_t probes = 0;
    /// Every probe made while bracketing, as (eps, feasible).
    std::vector<std::pair<double, bool>> outcomes;
};

/// Returns [0, hi] with probe(hi) feasible. The first guess for hi is the
/// largest rate-scaled residual of the equal-weight simultaneous POCS point;
/// it is doubled until feasible. A problem feasible without dilation gives
/// (0, 0). Throws NumericalError when no dilatable set exists or the doubling
/// cap is hit.
Bracket initial_bracket(const DilationProblem& problem);

struct DilationResult {
    double epsilon_star = 0.0;
    Vector x_star;
    std::vector<std::pair<double, double>> bracket_history;
    std::size_t probes = 0;
};

/// Generic feasibility test used by the bisection: returns a witness when the
/// problem dilated by `eps` is feasible. `warm_start` is the latest feasible
/// witness.
using FeasibilityOracle = std::function<std::optional<Vector>(double eps, const Vector& warm_start)>;

/// Bisects [lo, hi] until hi - lo <= bracket_tol. `hi_witness` must be
/// feasible at `hi`. Every probe outcome, including the `prior` ones made
/// before bisection started, is checked for monotonicity in eps; a feasible
/// probe below an infeasible one throws NumericalError.
DilationResult bisect_dilation(const FeasibilityOracle& oracle, double lo, double hi,
                               Vector hi_witness, double bracket_tol,
                               const std::vector<std::pair<double, bool>>& prior = {});

/// Smallest global dilation at which the rate-scaled sets intersect.
/// `bracket_tol` defaults to 1e-4 times the initial upper bracket.
DilationResult interval_halving(const DilationProblem& problem,
                                std::optional<double> bracket_tol = std::nullopt);

}  // namespace dpocs
