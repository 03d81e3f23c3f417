#include "dpocs/pocs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpocs/error.hpp"

namespace dpocs {

namespace {

void check_sets(const SetList& sets, const Vector& x0) {
    if (sets.empty()) throw InvalidArgument("POCS: empty set list");
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (!sets[i]) throw InvalidArgument("POCS: null set at index " + std::to_string(i));
        if (sets[i]->dim() != x0.size())
            throw InvalidArgument("POCS: set " + std::to_string(i) + " has dimension " +
                                  std::to_string(sets[i]->dim()) + ", start point has " +
                                  std::to_string(x0.size()));
    }
}

std::size_t stride_for(const PocsOptions& opts, std::size_t dim) {
    if (opts.trace_stride > 0) return opts.trace_stride;
    return dim > 1000 ? 10 : 1;
}

bool small_step(double displacement, double norm, double step_tol) {
    return displacement <= step_tol * std::max(1.0, norm);
}

}  // namespace

const char* to_string(PocsStatus status) noexcept {
    switch (status) {
        case PocsStatus::Converged: return "converged";
        case PocsStatus::LimitCycle: return "limit_cycle";
        case PocsStatus::IterationBudgetExhausted: return "iteration_budget_exhausted";
    }
    return "unknown";
}

void PocsOptions::validate() const {
    if (max_iters < 1) throw InvalidArgument("PocsOptions: max_iters must be >= 1");
    if (!(step_tol > 0.0) || !(residual_tol > 0.0))
        throw InvalidArgument("PocsOptions: tolerances must be > 0");
    if (stagnation_window < 1) throw InvalidArgument("PocsOptions: stagnation_window must be >= 1");
}

void PocsTrace::push(const Vector& x, double residual, double disp, bool keep_iterate) {
    if (keep_iterate) {
        iterate_index.push_back(residual_max.size());
        iterates.push_back(x);
    }
    residual_max.push_back(residual);
    displacement.push_back(disp);
    iterate_norm.push_back(norm2(x));
}

PocsStatus classify_outcome(const PocsTrace& trace, const PocsOptions& opts) {
    if (trace.size() == 0) throw InvalidArgument("classify_outcome: empty trace");
    const std::size_t last = trace.size() - 1;
    const double res = trace.residual_max[last];
    if (res <= opts.residual_tol) return PocsStatus::Converged;

    const std::size_t w = opts.stagnation_window;
    if (last >= w) {
        bool stagnant = true;
        for (std::size_t q = last + 1 - w; q <= last && stagnant; ++q)
            stagnant = small_step(trace.displacement[q], trace.iterate_norm[q], opts.step_tol);
        if (stagnant && std::abs(res - trace.residual_max[last - w]) <= opts.step_tol * res)
            return PocsStatus::LimitCycle;
    }
    return PocsStatus::IterationBudgetExhausted;
}

PocsOutcome alternating_pocs(const SetList& sets, const Vector& x0, double eps,
                             const PocsOptions& opts) {
    opts.validate();
    check_sets(sets, x0);
    if (!(eps >= 0.0)) throw InvalidArgument("alternating_pocs: eps must be >= 0");

    const std::size_t stride = stride_for(opts, x0.size());
    PocsOutcome out{PocsStatus::IterationBudgetExhausted, x0, {}, 0};
    Vector& x = out.x_final;
    out.trace.push(x, max_violation(sets, x, eps), 0.0, opts.record_trace);

    for (std::size_t q = 1; q <= opts.max_iters; ++q) {
        Vector next = x;
        for (const auto& s : sets) next = s->project_dilated(next, eps);
        const double disp = distance(next, x);
        x = std::move(next);
        out.iterations = q;
        const bool keep = opts.record_trace && (q % stride == 0 || q == opts.max_iters);
        out.trace.push(x, max_violation(sets, x, eps), disp, keep);

        const auto status = classify_outcome(out.trace, opts);
        if (status != PocsStatus::IterationBudgetExhausted) {
            out.status = status;
            if (opts.record_trace && !keep) {
                out.trace.iterate_index.push_back(q);
                out.trace.iterates.push_back(x);
            }
            return out;
        }
    }
    return out;
}

PocsOutcome simultaneous_pocs(const SetList& sets, const Vector& weights, const Vector& x0,
                              const PocsOptions& opts) {
    opts.validate();
    check_sets(sets, x0);
    if (weights.size() != sets.size())
        throw InvalidArgument("simultaneous_pocs: " + std::to_string(weights.size()) +
                              " weights for " + std::to_string(sets.size()) + " sets");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidArgument("simultaneous_pocs: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidArgument("simultaneous_pocs: weights sum to " + std::to_string(total) +
                              ", expected 1");

    const std::size_t stride = stride_for(opts, x0.size());
    const std::size_t n = x0.size();
    PocsOutcome out{PocsStatus::IterationBudgetExhausted, x0, {}, 0};
    Vector& x = out.x_final;
    out.trace.push(x, max_violation(sets, x, 0.0), 0.0, opts.record_trace);

    for (std::size_t q = 1; q <= opts.max_iters; ++q) {
        std::vector<double> acc(n, 0.0);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (weights[i] == 0.0) continue;
            const Vector p = sets[i]->project(x);
            for (std::size_t j = 0; j < n; ++j) acc[j] += weights[i] * p[j];
        }
        Vector next(std::move(acc));
        const double disp = distance(next, x);
        x = std::move(next);
        out.iterations = q;
        const bool done = small_step(disp, norm2(x), opts.step_tol);
        const bool keep = opts.record_trace && (q % stride == 0 || done || q == opts.max_iters);
        out.trace.push(x, max_violation(sets, x, 0.0), disp, keep);
        if (done) {
            out.status = PocsStatus::Converged;
            return out;
        }
    }
    return out;
}

}  // namespace dpocs
