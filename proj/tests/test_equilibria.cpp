#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "vircomp/equilibria.hpp"
#include "vircomp/errors.hpp"
#include "vircomp/integrators.hpp"

using namespace vircomp;
using vircomp::test::ParameterGen;

namespace {

const EquilibriumReport& find(const std::vector<EquilibriumReport>& reps, const std::string& label) {
    const auto it = std::find_if(reps.begin(), reps.end(), [&](const auto& r) { return r.label == label; });
    REQUIRE(it != reps.end());
    return *it;
}

bool all_hold(const EquilibriumReport& r) {
    return std::all_of(r.conditions.begin(), r.conditions.end(), [](const Condition& c) { return c.holds; });
}

}  // namespace

TEST_CASE("free equilibria of the reference phenotype") {
    const auto reps = equilibria_free(test::reference_phenotype());
    REQUIRE(reps.size() == 3);
    CHECK(reps[0].point == State{0, 0});
    CHECK(reps[0].eigenvalues.first == 3.0);
    CHECK(reps[0].eigenvalues.second == 1.0);
    CHECK(reps[0].verdict == Verdict::Unstable);
    CHECK(reps[1].point == State{10, 0});
    CHECK(reps[1].eigenvalues.first == doctest::Approx(-3.0));
    CHECK(reps[1].eigenvalues.second == doctest::Approx(1.0 / 6.0));
    CHECK(reps[1].verdict == Verdict::Unstable);
    CHECK(reps[2].point == State{0, 12});
    // diagonal order: first belongs to the V_A direction
    CHECK(reps[2].eigenvalues.first == doctest::Approx(-0.6));
    CHECK(reps[2].eigenvalues.second == doctest::Approx(-1.0));
    CHECK(reps[2].verdict == Verdict::Stable);
}

TEST_CASE("constant treatment u = 0.733097") {
    const auto reps = equilibria_constant_control(test::reference_phenotype(), test::reference_efficacy(), 0.733097);
    const auto& a = find(reps, "strain-a-only");
    CHECK(std::abs(a.point.v_a - 7.800709) <= 1e-6);
    CHECK(a.point.v_b == 0.0);
    CHECK(std::abs(a.eigenvalues.first - -2.3402127) <= 1e-6);
    CHECK(std::abs(a.eigenvalues.second - -0.0166076) <= 1e-6);
    CHECK(a.verdict == Verdict::Stable);
    const auto& b = find(reps, "strain-b-only");
    CHECK(std::abs(b.point.v_b - 7.601418) <= 1e-6);
    CHECK(std::abs(b.eigenvalues.first - 0.0597873) <= 1e-6);
    CHECK(std::abs(b.eigenvalues.second - -0.6334515) <= 1e-6);
    CHECK(b.verdict == Verdict::Unstable);
    CHECK(find(reps, "origin").verdict == Verdict::Unstable);
    CHECK(reps.size() == 3);
}

TEST_CASE("zero control reduces to the free equilibria") {
    ParameterGen gen(31);
    for (int i = 0; i < 20; ++i) {
        const Phenotype p = gen.phenotype();
        const auto free = equilibria_free(p);
        const auto ctrl = equilibria_constant_control(p, gen.efficacy(), 0.0);
        REQUIRE(ctrl.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(ctrl[k].point == free[k].point);
            CHECK(ctrl[k].verdict == free[k].verdict);
            CHECK(ctrl[k].eigenvalues.first == doctest::Approx(free[k].eigenvalues.first));
            CHECK(ctrl[k].eigenvalues.second == doctest::Approx(free[k].eigenvalues.second));
        }
    }
}

TEST_CASE("degenerate control and the line of equilibria") {
    const auto p = test::reference_phenotype();
    const auto e = test::reference_efficacy();
    const double u = degenerate_control(p, e);
    CHECK(std::abs(u - 2.0 / 3.0) <= 1e-12);

    const auto reps = equilibria_constant_control(p, e, u);
    const auto& line = find(reps, "coexistence-line");
    REQUIRE(line.line.has_value());
    CHECK(line.line->intercept == doctest::Approx(8.0));
    CHECK(line.verdict == Verdict::LineDegenerate);
    // one eigenvalue vanishes along the line, the transverse one is negative
    CHECK(std::abs(line.eigenvalues.first) <= 1e-9);
    CHECK(line.eigenvalues.second < 0.0);

    const Dynamics dyn{p, e};
    for (double va : {0.0, 1.0, 4.0, 7.5, 8.0}) {
        const State d = dyn.f({va, 8.0 - va}, u);
        CHECK(std::abs(d.v_a) <= 1e-12);
        CHECK(std::abs(d.v_b) <= 1e-12);
    }
}

TEST_CASE("no degenerate control when the mutant barely responds") {
    const Efficacy weak{0.9, 0.25};
    CHECK_FALSE(find_degenerate_control(test::reference_phenotype(), weak).has_value());
    CHECK_THROWS_AS((void)degenerate_control(test::reference_phenotype(), weak), NoDegenerateControl);
}

TEST_CASE("boundary points outside the quadrant are flagged") {
    // u > r_a / c_a pushes the strain-A point to negative density
    const Phenotype p{0.5, 1.0, 10.0, 12.0};
    const Efficacy e{1.0, 0.5};
    const auto reps = equilibria_constant_control(p, e, 0.8);
    const auto& a = find(reps, "strain-a-only");
    CHECK(a.point.v_a < 0.0);
    CHECK_FALSE(a.in_biological_domain);
    CHECK(a.note == "outside biological domain");
}

TEST_CASE("triangular matrices give their diagonal") {
    ParameterGen gen(32);
    for (int i = 0; i < 100; ++i) {
        const double d1 = gen.uniform(-5, 5), d2 = gen.uniform(-5, 5), off = gen.uniform(-5, 5);
        const auto upper = classify_stability({d1, off, 0.0, d2});
        const auto lower = classify_stability({d1, 0.0, off, d2});
        CHECK(upper.eigenvalues.first == d1);
        CHECK(upper.eigenvalues.second == d2);
        CHECK(lower.eigenvalues.first == d1);
        CHECK(lower.eigenvalues.second == d2);
    }
}

TEST_CASE("general 2x2 eigenvalues satisfy trace and determinant") {
    ParameterGen gen(33);
    for (int i = 0; i < 100; ++i) {
        const Mat2 m{gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-3, 3)};
        const auto r = classify_stability(m);
        if (r.complex) {
            CHECK(r.eigenvalues.first == doctest::Approx(m.trace() / 2));
            CHECK(m.trace() * m.trace() < 4 * m.det());
        } else {
            CHECK(r.eigenvalues.first + r.eigenvalues.second == doctest::Approx(m.trace()).scale(3.0));
            CHECK(r.eigenvalues.first * r.eigenvalues.second == doctest::Approx(m.det()).scale(3.0));
        }
    }
}

TEST_CASE("conditions agree with the verdicts") {
    ParameterGen gen(34);
    for (int i = 0; i < 200; ++i) {
        const Phenotype p = gen.phenotype();
        const Efficacy e = gen.efficacy();
        const double u = gen.uniform(0.0, 1.0);
        auto check_all = [](const std::vector<EquilibriumReport>& reps) {
            for (const auto& r : reps) {
                if (r.verdict == Verdict::LineDegenerate || r.verdict == Verdict::Marginal) continue;
                if (!r.in_biological_domain) continue;
                CAPTURE(r.label);
                CHECK(all_hold(r) == (r.verdict == Verdict::Stable));
            }
        };
        check_all(equilibria_free(p));
        check_all(equilibria_constant_control(p, e, u));
    }
}

TEST_CASE("stable verdicts agree with the flow") {
    // integrate near each stable in-domain equilibrium and check the orbit approaches it
    ParameterGen gen(35);
    const CostWeights w{1.0};
    int checked = 0;
    for (int i = 0; i < 20; ++i) {
        const Phenotype p = gen.phenotype();
        const Efficacy e = gen.efficacy();
        const double u = gen.uniform(0.0, 1.0);
        const Dynamics dyn{p, e};
        for (const auto& r : equilibria_constant_control(p, e, u)) {
            if (!r.in_biological_domain || r.line) continue;
            const double slow = std::min(std::abs(r.eigenvalues.first), std::abs(r.eigenvalues.second));
            if (slow < 0.05) continue;
            const State start = r.point + State{0.05 * (1.0 + r.point.v_a), 0.05 * (1.0 + r.point.v_b)};
            const double horizon = std::ceil(std::min(400.0, 20.0 / slow));
            const Trajectory t = integrate_constant(StepMethod::Rk4, dyn, u, TimeGrid{0, horizon, 0.01}, start, w);
            const double d = test::dist(t.final_state().state, r.point);
            CAPTURE(r.label);
            if (r.verdict == Verdict::Stable) {
                CHECK(d <= 1e-3);
                ++checked;
            } else if (r.verdict == Verdict::Unstable) {
                CHECK(d > 1e-3);
                ++checked;
            }
        }
    }
    CHECK(checked > 20);
}
