#include <doctest.h>

#include <algorithm>
#include <vector>

#include "support.hpp"
#include "vircomp/errors.hpp"
#include "vircomp/ocp.hpp"
#include "vircomp/parallel.hpp"

using namespace vircomp;
using vircomp::test::ParameterGen;

namespace {

const Dynamics kDyn = test::reference_dynamics();
const CostWeights kWeights = CostWeights::for_phenotype(test::reference_phenotype());

double objective_of(StepMethod m, const ControlSchedule& s, State init, const CostWeights& w = kWeights) {
    return objective(integrate(m, kDyn, s.values, s.grid, init, w), s);
}

}  // namespace

TEST_CASE("objective at rest") {
    const TimeGrid g{0.0, 10.0, 0.1};
    for (StepMethod m : kAllMethods) {
        // sitting on the target costs nothing
        CHECK(objective_of(m, ControlSchedule::constant(g, 0.0, 1.0), {10.0, 0.0}) == doctest::Approx(0.0));
        // sitting at (0, k_b) costs (k_a^2 + k_b^2) per unit time
        CHECK(objective_of(m, ControlSchedule::constant(g, 0.0, 1.0), {0.0, 12.0}) ==
              doctest::Approx(244.0 * 10.0).epsilon(1e-12));
    }
}

TEST_CASE("control effort enters as u^2 per unit time") {
    // V_A = V_B = 0 stays at rest under any control
    const TimeGrid g{0.0, 4.0, 0.5};
    const double j = objective_of(StepMethod::Rk4, ControlSchedule::constant(g, 0.5, 1.0), {0.0, 0.0});
    CHECK(j == doctest::Approx(4.0 * (100.0 + 0.25)));
}

TEST_CASE("costates vanish at the target equilibrium and at the terminal time") {
    const TimeGrid g{0.0, 10.0, 0.1};
    const auto sched = ControlSchedule::constant(g, 0.0, 1.0);
    for (StepMethod m : kAllMethods) {
        const Trajectory t = integrate(m, kDyn, sched.values, g, {10.0, 0.0}, kWeights);
        const AdjointTrajectory adj = adjoint_sweep(kDyn, kWeights, t, sched);
        REQUIRE(adj.costates.size() == t.states.size());
        for (const State& l : adj.costates) CHECK(test::dist(l, {0, 0}) <= 1e-12);

        const Trajectory t2 = integrate(m, kDyn, sched.values, g, {1.0, 1.0}, kWeights);
        const AdjointTrajectory adj2 = adjoint_sweep(kDyn, kWeights, t2, sched);
        CHECK(adj2.costates.back() == State{0, 0});
    }
}

TEST_CASE("adjoint gradient matches finite differences for every scheme") {
    const TimeGrid g{0.0, 10.0, 0.25};
    ParameterGen gen(41);
    ControlSchedule s = ControlSchedule::constant(g, 0.0, 1.0);
    for (double& u : s.values) u = gen.uniform(0.05, 0.95);
    for (const CostWeights& w : {kWeights, CostWeights{10.0, 0.5, 50.0}}) {
        for (StepMethod m : kAllMethods) {
            CAPTURE(to_string(m));
            const Trajectory t = integrate(m, kDyn, s.values, g, {1.0, 1.0}, w);
            const auto grad = gradient(s, adjoint_sweep(kDyn, w, t, s));
            const auto fd = finite_difference_gradient(m, kDyn, w, g, {1.0, 1.0}, s.values, 1e-6);
            REQUIRE(grad.size() == fd.size());
            for (std::size_t i = 0; i < grad.size(); ++i) {
                CHECK(std::abs(grad[i] - fd[i]) <= 1e-4 * std::max(std::abs(fd[i]), 1e-6));
            }
        }
    }
}

TEST_CASE("stationary control equals the unit-scale target") {
    const TimeGrid g{0.0, 5.0, 0.1};
    ControlSchedule s = ControlSchedule::constant(g, 0.3, 1.0);
    const Trajectory t = integrate(StepMethod::Rk4, kDyn, s.values, g, {1.0, 1.0}, kWeights);
    const AdjointTrajectory adj = adjoint_sweep(kDyn, kWeights, t, s);
    const auto a = stationary_control(adj, 1.0);
    const auto b = scaled_stationary_control(s, gradient(s, adj), 1.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("forward-backward sweep on a short horizon") {
    const TimeGrid g{0.0, 20.0, 0.05};
    const SolveReport r = solve_fbsm(kDyn, kWeights, g, {1.0, 1.0}, 1.0);
    CHECK(r.converged);
    CHECK(r.ok());
    CHECK(r.iterations <= 500);
    for (double u : r.schedule.values) {
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
    }
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
        CHECK(r.objective_history[i] <= r.objective_history[i - 1]);
    }
    // no worse than doing nothing or treating at a fixed level
    for (double u : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(r.objective <= objective_of(StepMethod::Rk4, ControlSchedule::constant(g, u, 1.0), {1.0, 1.0}));
    }
    // interior controls are stationary
    const auto grad = gradient(r.schedule, r.adjoint);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double u = r.schedule.values[i];
        CAPTURE(i);
        CAPTURE(u);
        if (u > 1e-3 && u < 1.0 - 1e-3) CHECK(std::abs(grad[i]) <= 1e-3);
    }
}

TEST_CASE("starting on the target needs no treatment") {
    for (const Efficacy& e : {Efficacy{0.9, 0.5}, Efficacy{0.7, 0.7 - 1e-12}}) {
        const Dynamics dyn{test::reference_phenotype(), e};
        const SolveReport r = solve_fbsm(dyn, kWeights, TimeGrid{0.0, 10.0, 0.1}, {10.0, 0.0}, 1.0);
        CHECK(r.converged);
        CHECK(r.objective <= 1e-10);
        CHECK(*std::max_element(r.schedule.values.begin(), r.schedule.values.end()) <= 1e-6);
    }
}

TEST_CASE("objective converges under grid refinement") {
    std::vector<double> obj;
    for (double dt : {0.2, 0.1, 0.05}) {
        obj.push_back(solve_fbsm(kDyn, kWeights, TimeGrid{0.0, 20.0, dt}, {1.0, 1.0}, 1.0).objective);
    }
    CHECK(std::abs(obj[2] - obj[1]) < std::abs(obj[1] - obj[0]));
    CHECK(std::abs(obj[2] - obj[1]) <= 1e-2 * obj[2]);
}

TEST_CASE("warm start from the optimum converges immediately") {
    const TimeGrid g{0.0, 20.0, 0.1};
    const SolveReport cold = solve_fbsm(kDyn, kWeights, g, {1.0, 1.0}, 1.0);
    const SolveReport warm = solve_fbsm(kDyn, kWeights, g, {1.0, 1.0}, 1.0, {}, cold.schedule.values);
    CHECK(warm.converged);
    CHECK(warm.iterations <= cold.iterations);
    CHECK(warm.objective <= cold.objective * (1.0 + 1e-9));
}

TEST_CASE("penalty method keeps V_B under the cap") {
    const TimeGrid g{0.0, 20.0, 0.05};
    PenaltyOptions pen;
    pen.rounds = 7;
    const SolveReport r = solve_penalty(kDyn, kWeights, g, {1.0, 0.25}, 1.0, 0.5, {}, pen);
    CHECK(r.constraint_violation <= 1e-3 * 0.5);
    CHECK_FALSE(r.constraint_not_met);
    CHECK(r.constraint_violation == constraint_violation(r.trajectory, 0.5));
    REQUIRE(!r.rounds.empty());
    for (std::size_t i = 1; i < r.rounds.size(); ++i) {
        CHECK(r.rounds[i].mu == doctest::Approx(10.0 * r.rounds[i - 1].mu));
    }
}

TEST_CASE("penalty method rejects an infeasible start") {
    CHECK_THROWS_AS((void)solve_penalty(kDyn, kWeights, TimeGrid{0.0, 5.0, 0.1}, {1.0, 1.0}, 1.0, 0.5),
                    InfeasibleStart);
}

TEST_CASE("schedule validation") {
    const TimeGrid g{0.0, 1.0, 0.1};
    ControlSchedule s = ControlSchedule::constant(g, 0.5, 0.4);
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = ControlSchedule::constant(g, 0.2, 0.4);
    CHECK_NOTHROW(s.validate());
    s.values.pop_back();
    CHECK_THROWS_AS(s.validate(), GridMismatch);
}
