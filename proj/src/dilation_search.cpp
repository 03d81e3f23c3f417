#include "dpocs/dilation_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dpocs/error.hpp"

namespace dpocs {

namespace {

ProbeResult from_outcome(PocsOutcome&& outcome, bool feasible) {
    ProbeResult r;
    r.feasible = feasible;
    r.status = outcome.status;
    r.iterations = outcome.iterations;
    r.residual = outcome.trace.residual_max.back();
    r.x = std::move(outcome.x_final);
    return r;
}

bool still_settling(const PocsTrace& trace, std::size_t window) {
    const auto n = trace.size();
    if (n <= window + 1) return true;
    return trace.displacement[n - 1] < trace.displacement[n - 1 - window];
}

// Records probe outcomes and fails loudly when feasibility is not monotone in eps.
class ProbeLog {
public:
    void record(double eps, bool feasible) {
        if (feasible) {
            min_feasible_ = std::min(min_feasible_, eps);
        } else {
            max_infeasible_ = std::max(max_infeasible_, eps);
        }
        if (min_feasible_ < max_infeasible_)
            throw NumericalError("dilation search: tolerance conflict, feasible at eps=" +
                                 std::to_string(min_feasible_) + " but infeasible at eps=" +
                                 std::to_string(max_infeasible_));
        ++count_;
    }
    std::size_t count() const noexcept { return count_; }

private:
    double min_feasible_ = std::numeric_limits<double>::infinity();
    double max_infeasible_ = -std::numeric_limits<double>::infinity();
    std::size_t count_ = 0;
};

// Alternating projections between nearly parallel sets close in on their
// common point geometrically, x[q] - x* ~ rho^q v. Two more cycles give rho
// and the limit x* = x2 + rho / (1 - rho) (x2 - x1).
std::optional<Vector> extrapolate_limit(const SetList& sets, const Vector& x0, double eps,
                                        const PocsOptions& opts) {
    PocsOptions one = opts;
    one.max_iters = 1;
    one.record_trace = false;
    const Vector x1 = alternating_pocs(sets, x0, eps, one).x_final;
    const Vector x2 = alternating_pocs(sets, x1, eps, one).x_final;
    const Vector d1 = x1 - x0;
    const Vector d2 = x2 - x1;
    const double dd = dot(d1, d1);
    if (!(dd > 0.0)) return std::nullopt;
    const double rho = dot(d2, d1) / dd;
    if (!(rho > 0.0 && rho < 1.0)) return std::nullopt;
    return axpy(rho / (1.0 - rho), d2, x2);
}

// Feasible result from POCS restarted at the extrapolated limit, if that run
// converges.
std::optional<ProbeResult> jump_to_limit(const SetList& sets, const PocsOutcome& run, double eps,
                                         const PocsOptions& opts) {
    const auto guess = extrapolate_limit(sets, run.x_final, eps, opts);
    if (!guess) return std::nullopt;
    auto jump = alternating_pocs(sets, *guess, eps, opts);
    if (jump.status != PocsStatus::Converged) return std::nullopt;
    jump.iterations += run.iterations + 2;
    return from_outcome(std::move(jump), true);
}

}  // namespace

ProbeResult feasibility_probe(const SetList& sets, double eps, const Vector& x0,
                              const PocsOptions& opts) {
    if (!(eps >= 0.0)) throw InvalidArgument("feasibility_probe: eps must be >= 0");
    auto first = alternating_pocs(sets, x0, eps, opts);
    if (first.status == PocsStatus::Converged) return from_outcome(std::move(first), true);
    if (first.status == PocsStatus::LimitCycle) return from_outcome(std::move(first), false);
    if (!still_settling(first.trace, opts.stagnation_window))
        return from_outcome(std::move(first), false);

    if (auto jump = jump_to_limit(sets, first, eps, opts)) return std::move(*jump);

    auto second = alternating_pocs(sets, first.x_final, eps, opts);
    second.iterations += first.iterations;
    if (second.status == PocsStatus::Converged) return from_outcome(std::move(second), true);
    if (second.status == PocsStatus::LimitCycle) return from_outcome(std::move(second), false);
    if (auto jump = jump_to_limit(sets, second, eps, opts)) return std::move(*jump);
    const bool close = max_violation(sets, second.x_final, eps) <= 2.0 * opts.residual_tol;
    return from_outcome(std::move(second), close);
}

Bracket initial_bracket(const DilationProblem& problem) {
    const auto& sets = problem.sets;
    Bracket b{0.0, 0.0, problem.x0, 0, {}};

    auto at_zero = feasibility_probe(sets, 0.0, problem.x0, problem.probe);
    ++b.probes;
    b.outcomes.emplace_back(0.0, at_zero.feasible);
    if (at_zero.feasible) {
        b.witness = std::move(*at_zero.x);
        return b;
    }

    const bool any_rate = std::any_of(sets.begin(), sets.end(),
                                      [](const SetPtr& s) { return s->rate() > 0.0; });
    if (!any_rate)
        throw NumericalError("dilation search: sets do not intersect and every rate is zero");

    Vector weights(sets.size(), 1.0 / static_cast<double>(sets.size()));
    const auto mmse = simultaneous_pocs(sets, weights, problem.x0, problem.probe);
    double hi = 0.0;
    for (const auto& s : sets)
        if (s->rate() > 0.0) hi = std::max(hi, s->violation(mmse.x_final, 0.0) / s->rate());
    if (!(hi > 0.0)) hi = 1.0;

    Vector start = mmse.x_final;
    for (std::size_t k = 0; k <= problem.max_doublings; ++k) {
        auto probe = feasibility_probe(sets, hi, start, problem.probe);
        ++b.probes;
        b.outcomes.emplace_back(hi, probe.feasible);
        if (probe.feasible) {
            b.hi = hi;
            b.witness = std::move(*probe.x);
            return b;
        }
        hi *= 2.0;
    }
    throw NumericalError("dilation search: no feasible dilation found after " +
                         std::to_string(problem.max_doublings) + " doublings");
}

DilationResult bisect_dilation(const FeasibilityOracle& oracle, double lo, double hi,
                               Vector hi_witness, double bracket_tol,
                               const std::vector<std::pair<double, bool>>& prior) {
    if (!(bracket_tol > 0.0)) throw InvalidArgument("bisect_dilation: bracket_tol must be > 0");
    if (!(lo >= 0.0) || lo > hi) throw InvalidArgument("bisect_dilation: invalid bracket");

    ProbeLog log;
    for (const auto& [eps, feasible] : prior) log.record(eps, feasible);
    const std::size_t seeded = log.count();
    log.record(hi, true);
    DilationResult r{hi, std::move(hi_witness), {{lo, hi}}, 0};
    while (hi - lo > bracket_tol) {
        const double mid = 0.5 * (lo + hi);
        auto witness = oracle(mid, r.x_star);
        log.record(mid, witness.has_value());
        if (witness) {
            hi = mid;
            r.x_star = std::move(*witness);
        } else {
            lo = mid;
        }
        r.bracket_history.emplace_back(lo, hi);
    }
    r.epsilon_star = hi;
    r.probes = log.count() - seeded - 1;
    return r;
}

DilationResult interval_halving(const DilationProblem& problem, std::optional<double> bracket_tol) {
    auto bracket = initial_bracket(problem);
    if (bracket.hi == 0.0) {
        return DilationResult{0.0, std::move(bracket.witness), {{0.0, 0.0}}, bracket.probes};
    }
    const double tol = bracket_tol.value_or(1e-4 * bracket.hi);

    // The latest witness usually sits next to the smaller intersection, but
    // on long thin valleys it can be a poor start; an undecided or cycling
    // run from it is repeated from the problem's own starting point.
    const FeasibilityOracle oracle = [&](double eps, const Vector& warm) -> std::optional<Vector> {
        auto p = feasibility_probe(problem.sets, eps, warm, problem.probe);
        if (p.feasible) return std::move(p.x);
        if (warm == problem.x0) return std::nullopt;
        auto cold = feasibility_probe(problem.sets, eps, problem.x0, problem.probe);
        if (cold.feasible) return std::move(cold.x);
        return std::nullopt;
    };
    // Bisection restarts from [0, hi] rather than the last infeasible doubling,
    // so the bracketing probes double as a consistency check.
    auto result = bisect_dilation(oracle, bracket.lo, bracket.hi, std::move(bracket.witness), tol,
                                  bracket.outcomes);
    result.probes += bracket.probes;
    return result;
}

}  // namespace dpocs
