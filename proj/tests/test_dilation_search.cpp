#include <doctest.h>

#include <cmath>
#include <memory>

#include "dpocs/convex_sets.hpp"
#include "dpocs/dilation_search.hpp"
#include "dpocs/error.hpp"
#include "dpocs/rng.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace dpocs;

namespace {

SetList affine_rows(const oracle::Dense& A, const std::vector<double>& y, double rate = 1.0) {
    SetList sets;
    for (std::size_t l = 0; l < A.size(); ++l) sets.push_back(std::make_shared<AffineSet>(Vector(A[l]), y[l], rate));
    return sets;
}

const oracle::Dense kExampleA{{1, 0}, {0, 1}, {1, 1}, {1, 1}, {1, 1}};
const std::vector<double> kExampleY{0, 0, 1, 2, 7};

DilationProblem example_problem(double rate = 1.0) {
    return {affine_rows(kExampleA, kExampleY, rate), Vector{0, 0}, {}, 60};
}

}  // namespace

TEST_CASE("feasibility probes on the example system") {
    const auto sets = affine_rows(kExampleA, kExampleY);
    CHECK(feasibility_probe(sets, 3.0, Vector{0, 0}, {}).feasible);
    CHECK(feasibility_probe(sets, 3.5, Vector{5, -5}, {}).feasible);
    CHECK_FALSE(feasibility_probe(sets, 1.0, Vector{0, 0}, {}).feasible);
    CHECK_FALSE(feasibility_probe(sets, 2.9, Vector{0, 0}, {}).feasible);

    const auto shared = affine_rows({{1, 0}, {0, 1}, {1, 1}}, {1, 2, 3});
    const auto p = feasibility_probe(shared, 0.0, Vector{0, 0}, {});
    REQUIRE(p.feasible);
    CHECK((*p.x)[0] == doctest::Approx(1.0));
    CHECK((*p.x)[1] == doctest::Approx(2.0));
}

TEST_CASE("initial bracket") {
    const auto b = initial_bracket(example_problem());
    CHECK(b.lo == 0.0);
    CHECK(b.hi >= 3.0);
    CHECK(max_violation(example_problem().sets, b.witness, b.hi) <= 2 * PocsOptions{}.residual_tol);
    CHECK(b.outcomes.size() == b.probes);

    DilationProblem single{affine_rows({{1, 2}}, {4}), Vector{0, 0}, {}, 60};
    const auto s = initial_bracket(single);
    CHECK(s.hi == 0.0);
    CHECK(s.probes == 1);

    DilationProblem hard{affine_rows(kExampleA, kExampleY, 0.0), Vector{0, 0}, {}, 60};
    CHECK_THROWS_AS(initial_bracket(hard), NumericalError);
}

TEST_CASE("doubling cap is enforced") {
    // Two disjoint hard constraints: no dilation of the third set helps.
    SetList sets{std::make_shared<AffineSet>(Vector{1, 0}, 0.0, 0.0),
                 std::make_shared<AffineSet>(Vector{1, 0}, 1.0, 0.0),
                 std::make_shared<AffineSet>(Vector{0, 1}, 0.0, 1.0)};
    PocsOptions probe;
    probe.max_iters = 200;
    DilationProblem p{sets, Vector{0, 0}, probe, 5};
    CHECK_THROWS_AS(initial_bracket(p), NumericalError);
}

TEST_CASE("example system minimax dilation is 3") {
    const auto r = interval_halving(example_problem(), 1e-4);
    CHECK(std::abs(r.epsilon_star - 3.0) <= 1e-4);
    CHECK(r.x_star[0] + r.x_star[1] == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(r.x_star[0] >= 1.0 - 1e-3);
    CHECK(r.x_star[0] <= 3.0 + 1e-3);
    // From the symmetric start the witness stays at the minimax point.
    CHECK(std::abs(r.x_star[0] - 2.0) <= 1e-2);
    CHECK(std::abs(r.x_star[1] - 2.0) <= 1e-2);
}

TEST_CASE("parallel lines d apart meet at d / 2") {
    for (double d : {0.5, 2.0, 7.0}) {
        DilationProblem p{affine_rows({{1, 0}, {1, 0}}, {0.0, d}), Vector{3, 1}, {}, 60};
        const double tol = 1e-6;
        const auto r = interval_halving(p, tol);
        CHECK(std::abs(r.epsilon_star - d / 2) <= tol);
        CHECK(r.x_star[0] == doctest::Approx(d / 2).epsilon(1e-5));
    }
}

TEST_CASE("a feasible problem needs no dilation") {
    const auto r = interval_halving({affine_rows({{1, 0}, {0, 1}}, {1, 2}), Vector{0, 0}, {}, 60});
    CHECK(r.epsilon_star == 0.0);
    REQUIRE(r.bracket_history.size() == 1);
    CHECK(r.bracket_history[0] == std::pair<double, double>{0.0, 0.0});
}

TEST_CASE("bracket invariants hold at every step") {
    const double tol = 1e-5;
    const auto r = interval_halving(example_problem(), tol);
    REQUIRE(r.bracket_history.size() >= 2);
    for (std::size_t k = 1; k < r.bracket_history.size(); ++k) {
        CHECK(r.bracket_history[k].first >= r.bracket_history[k - 1].first);
        CHECK(r.bracket_history[k].second <= r.bracket_history[k - 1].second);
        CHECK(r.bracket_history[k].first <= r.bracket_history[k].second);
    }
    const auto [lo, hi] = r.bracket_history.back();
    CHECK(hi - lo <= tol);
    CHECK(r.epsilon_star == hi);
    CHECK(r.probes == r.bracket_history.size() - 1 + initial_bracket(example_problem()).probes);

    // Every lo is infeasible (or zero), every hi feasible.
    const auto sets = example_problem().sets;
    for (const auto& [l, h] : r.bracket_history) {
        if (l > 0.0) CHECK_FALSE(feasibility_probe(sets, l, Vector{0, 0}, {}).feasible);
        CHECK(feasibility_probe(sets, h, Vector{0, 0}, {}).feasible);
    }
}

TEST_CASE("bisection with an exact oracle") {
    const double t = 0.3721;
    const FeasibilityOracle oracle = [&](double eps, const Vector& warm) -> std::optional<Vector> {
        if (eps >= t) return warm;
        return std::nullopt;
    };
    const auto r = bisect_dilation(oracle, 0.0, 1.0, Vector{1}, 1e-6);
    CHECK(r.epsilon_star >= t);
    CHECK(r.epsilon_star - t <= 1e-6);
    CHECK(r.probes == r.bracket_history.size() - 1);
    CHECK_THROWS_AS(bisect_dilation(oracle, 0.0, 1.0, Vector{1}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(bisect_dilation(oracle, 2.0, 1.0, Vector{1}, 1e-3), InvalidArgument);
}

TEST_CASE("non-monotone feasibility is a tolerance conflict") {
    // Feasible on [0.4, 0.6] and above 0.9 only.
    const FeasibilityOracle oracle = [](double eps, const Vector& warm) -> std::optional<Vector> {
        if ((eps >= 0.4 && eps <= 0.6) || eps >= 0.9) return warm;
        return std::nullopt;
    };
    // The bracketing probe at 0.75 said infeasible; bisection then finds 0.5 feasible.
    CHECK_THROWS_AS(bisect_dilation(oracle, 0.0, 1.0, Vector{1}, 1e-3, {{0.0, false}, {0.75, false}}),
                    NumericalError);
    // A hi that is feasible while a prior probe above it was not.
    CHECK_THROWS_AS(bisect_dilation(oracle, 0.0, 1.0, Vector{1}, 1e-3, {{1.5, false}}), NumericalError);
}

TEST_CASE("witness satisfies every dilated set") {
    Rng rng(51, 0);
    for (int trial = 0; trial < 10; ++trial) {
        oracle::Dense A(5, std::vector<double>(2));
        std::vector<double> y(5);
        for (auto& row : A)
            for (auto& v : row) v = rng.uniform(-3, 3);
        for (auto& v : y) v = rng.uniform(-3, 3);
        const auto r = interval_halving({affine_rows(A, y), Vector{0, 0}, {}, 60});
        const auto sets = affine_rows(A, y);
        CHECK(max_violation(sets, r.x_star, r.epsilon_star) <= 2 * PocsOptions{}.residual_tol);
    }
}

TEST_CASE("rate scaling divides the dilation") {
    const double c = 4.0;
    const auto base = interval_halving(example_problem(1.0), 1e-5);
    const auto scaled = interval_halving(example_problem(c), 1e-5 / c);
    CHECK(scaled.epsilon_star * c == doctest::Approx(base.epsilon_star).epsilon(1e-4));
    const auto s1 = example_problem(1.0).sets;
    const auto sc = example_problem(c).sets;
    const double tol = 2 * PocsOptions{}.residual_tol;
    CHECK(max_violation(s1, scaled.x_star, scaled.epsilon_star * c) <= tol);
    CHECK(max_violation(sc, base.x_star, base.epsilon_star / c) <= tol);
}

TEST_CASE("hard constraints hold regardless of dilation") {
    // x1 = 0.5 and x2 = 0 are hard; the soft rows must absorb the misfit.
    SetList sets{std::make_shared<AffineSet>(Vector{1, 0}, 0.5, 0.0),
                 std::make_shared<AffineSet>(Vector{0, 1}, 0.0, 0.0),
                 std::make_shared<AffineSet>(Vector{1, 1}, 3.0, 1.0),
                 std::make_shared<AffineSet>(Vector{1, -1}, -1.0, 1.0)};
    const auto r = interval_halving({sets, Vector{0, 0}, {}, 60}, 1e-6);
    CHECK(sets[0]->violation(r.x_star, r.epsilon_star) <= PocsOptions{}.residual_tol);
    CHECK(sets[1]->violation(r.x_star, r.epsilon_star) <= PocsOptions{}.residual_tol);
    // Residuals at (0.5, 0) are 2.5 and 1.5.
    CHECK(r.epsilon_star == doctest::Approx(2.5).epsilon(1e-5));
}

TEST_CASE("mixed families: box and ball") {
    // Unit box and a ball of radius 1 centred at (4, 0): gap 2 in the x direction.
    SetList sets{std::make_shared<BoxSet>(std::vector<double>{-1, -1}, std::vector<double>{1, 1}),
                 std::make_shared<BallSet>(Vector{4, 0}, 1.0)};
    const auto r = interval_halving({sets, Vector{0, 0}, {}, 60}, 1e-6);
    CHECK(r.epsilon_star == doctest::Approx(1.0).epsilon(1e-5));
}
