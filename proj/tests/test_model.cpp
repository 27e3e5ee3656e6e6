#include <doctest.h>

#include "support.hpp"
#include "vircomp/errors.hpp"
#include "vircomp/model.hpp"

using namespace vircomp;
using vircomp::test::ParameterGen;

TEST_CASE("free right-hand side at (1, 1)") {
    const State d = rhs_free(test::reference_phenotype(), {1.0, 1.0});
    CHECK(d.v_a == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(d.v_b == doctest::Approx(0.8333333333333334).epsilon(1e-12));
}

TEST_CASE("full treatment at (1, 1)") {
    const State d = rhs_controlled(test::reference_phenotype(), test::reference_efficacy(), {1.0, 1.0}, 1.0);
    CHECK(d.v_a == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(d.v_b == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((Phenotype{3, 1, 12, 10}.validate()), ValidationError);
    CHECK_THROWS_AS((Phenotype{3, 1, 10, 10}.validate()), ValidationError);
    CHECK_THROWS_AS((Phenotype{0, 1, 10, 12}.validate()), ValidationError);
    CHECK_NOTHROW(test::reference_phenotype().validate());
    CHECK_THROWS_AS((Efficacy{0.5, 0.9}.validate()), ValidationError);
    CHECK_THROWS_AS((Efficacy{1.2, 0.5}.validate()), ValidationError);
    CHECK_THROWS_AS((Efficacy{0.5, -0.1}.validate()), ValidationError);
    CHECK_NOTHROW(test::reference_efficacy().validate());
    const auto p = test::reference_phenotype();
    const auto e = test::reference_efficacy();
    CHECK_THROWS_AS((void)rhs_controlled(p, e, {1, 1}, -0.1), ValidationError);
    CHECK_THROWS_AS((void)rhs_controlled(p, e, {1, 1}, 1.1), ValidationError);
}

TEST_CASE("zero control reproduces the free system bit for bit") {
    ParameterGen gen(11);
    for (int i = 0; i < 200; ++i) {
        const Phenotype p = gen.phenotype();
        const Efficacy e = gen.efficacy();
        const State s = gen.state(2.5 * p.k_b);
        CHECK(rhs_controlled(p, e, s, 0.0) == rhs_free(p, s));
    }
}

TEST_CASE("Jacobian agrees with central differences") {
    ParameterGen gen(12);
    constexpr double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const Dynamics dyn{gen.phenotype(), gen.efficacy()};
        const State s = gen.state(1.5 * dyn.phenotype.k_b);
        const double u = gen.uniform(0.0, 1.0);
        const Mat2 j = dyn.dfdx(s, u);
        const State da = dyn.f(s + State{h, 0}, u) - dyn.f(s - State{h, 0}, u);
        const State db = dyn.f(s + State{0, h}, u) - dyn.f(s - State{0, h}, u);
        const double scale = 1.0 + std::abs(j.a11) + std::abs(j.a12) + std::abs(j.a21) + std::abs(j.a22);
        CHECK(std::abs(da.v_a / (2 * h) - j.a11) <= 1e-6 * scale);
        CHECK(std::abs(da.v_b / (2 * h) - j.a21) <= 1e-6 * scale);
        CHECK(std::abs(db.v_a / (2 * h) - j.a12) <= 1e-6 * scale);
        CHECK(std::abs(db.v_b / (2 * h) - j.a22) <= 1e-6 * scale);

        const State du = (1.0 / (2 * h)) * (dyn.f(s, std::min(u + h, 1.0)) - dyn.f(s, std::max(u - h, 0.0)));
        const double span = (std::min(u + h, 1.0) - std::max(u - h, 0.0)) / (2 * h);
        const State sens = dyn.dfdu(s);
        CHECK(du.v_a == doctest::Approx(span * sens.v_a).epsilon(1e-6).scale(1.0));
        CHECK(du.v_b == doctest::Approx(span * sens.v_b).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("axes are invariant") {
    ParameterGen gen(13);
    for (int i = 0; i < 100; ++i) {
        const Phenotype p = gen.phenotype();
        const Efficacy e = gen.efficacy();
        const double u = gen.uniform(0.0, 1.0);
        CHECK(rhs_controlled(p, e, {0.0, gen.uniform(0.0, 30.0)}, u).v_a == 0.0);
        CHECK(rhs_controlled(p, e, {gen.uniform(0.0, 30.0), 0.0}, u).v_b == 0.0);
    }
}

TEST_CASE("both strains decline when the total exceeds both capacities") {
    ParameterGen gen(14);
    for (int i = 0; i < 100; ++i) {
        const Phenotype p = gen.phenotype();
        const State s{gen.uniform(0.1, 2.0) * p.k_b, gen.uniform(0.1, 2.0) * p.k_b};
        if (s.v_a + s.v_b <= p.k_b) continue;
        const State d = rhs_controlled(p, gen.efficacy(), s, gen.uniform(0.0, 1.0));
        CHECK(d.v_a < 0.0);
        CHECK(d.v_b < 0.0);
    }
}

TEST_CASE("running cost is non-negative and its gradient matches differences") {
    ParameterGen gen(15);
    for (int i = 0; i < 100; ++i) {
        CostWeights w{gen.uniform(1.0, 15.0)};
        if (i % 2) {
            w.penalty_xi = gen.uniform(0.1, 3.0);
            w.penalty_mu = gen.uniform(1.0, 100.0);
        }
        const State s = gen.state(15.0);
        const double u = gen.uniform(0.0, 1.0);
        CHECK(cost_integrand(s, u, w) >= 0.0);
        CHECK(cost_integrand(s, u, w) == doctest::Approx(state_cost(s, w) + u * u));
        const State g = state_cost_gradient(s, w);
        constexpr double h = 1e-6;
        const double ga = (state_cost(s + State{h, 0}, w) - state_cost(s - State{h, 0}, w)) / (2 * h);
        const double gb = (state_cost(s + State{0, h}, w) - state_cost(s - State{0, h}, w)) / (2 * h);
        CHECK(g.v_a == doctest::Approx(ga).epsilon(1e-5).scale(1.0));
        CHECK(g.v_b == doctest::Approx(gb).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("penalty only acts above xi") {
    CostWeights w{10.0, 0.5, 100.0};
    CHECK(state_cost({10.0, 0.4}, w) == doctest::Approx(0.16));
    CHECK(state_cost({10.0, 0.6}, w) == doctest::Approx(0.36 + 100.0 * 0.01));
}
