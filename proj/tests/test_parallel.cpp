#include <doctest.h>

#include <vector>

#include "support.hpp"
#include "vircomp/parallel.hpp"

using namespace vircomp;

TEST_CASE("bundle: OpenMP and serial kernels agree exactly") {
    const Dynamics dyn = test::reference_dynamics();
    const TimeGrid g{0.0, 10.0, 0.05};
    const std::vector<double> schedule(g.intervals(), 0.4);
    std::vector<State> inits;
    for (int i = 0; i < 12; ++i) inits.push_back({0.5 + i, 11.5 - i});
    inits.push_back({40.0, 40.0});  // explicit Euler overshoots from here at this step
    const CostWeights w{10.0};
    for (StepMethod m : kAllMethods) {
        const auto par = integrate_bundle(m, dyn, schedule, TimeGrid{0.0, 10.0, 0.5}, inits, w);
        const auto ser = integrate_bundle_serial(m, dyn, schedule, TimeGrid{0.0, 10.0, 0.5}, inits, w);
        REQUIRE(par.size() == ser.size());
        for (std::size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i].init == inits[i]);
            CHECK(par[i].ok() == ser[i].ok());
            CHECK(par[i].error == ser[i].error);
            if (par[i].ok() && ser[i].ok()) {
                CHECK(par[i].trajectory->final_state().state == ser[i].trajectory->final_state().state);
                CHECK(par[i].trajectory->final_state().v_c == ser[i].trajectory->final_state().v_c);
            }
        }
    }
}

TEST_CASE("a failing member does not abort the bundle") {
    const Dynamics dyn{test::reference_phenotype(), Efficacy{}};
    const TimeGrid g{0.0, 10.0, 1.0};
    const std::vector<double> schedule(g.intervals(), 0.0);
    const std::vector<State> inits{{1.0, 1.0}, {30.0, 30.0}, {2.0, 2.0}};
    const auto b = integrate_bundle(StepMethod::ExplicitEuler, dyn, schedule, g, inits, CostWeights{10.0});
    REQUIRE(b.size() == 3);
    CHECK(b[0].ok());
    CHECK_FALSE(b[1].ok());
    CHECK_FALSE(b[1].error.empty());
    CHECK(b[2].ok());
}

TEST_CASE("arrow field: OpenMP and serial kernels agree exactly") {
    const Dynamics dyn = test::reference_dynamics();
    const auto par = arrow_field(dyn, 0.5, 12.0, 14.0, 9, 7);
    const auto ser = arrow_field_serial(dyn, 0.5, 12.0, 14.0, 9, 7);
    REQUIRE(par.size() == 63);
    REQUIRE(ser.size() == 63);
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].v_a == ser[i].v_a);
        CHECK(par[i].v_b == ser[i].v_b);
        CHECK(par[i].dir_a == ser[i].dir_a);
        CHECK(par[i].dir_b == ser[i].dir_b);
        CHECK(par[i].magnitude == ser[i].magnitude);
    }
    CHECK(par.front().v_a == 0.0);
    CHECK(par.front().v_b == 0.0);
    CHECK(par.back().v_a == 12.0);
    CHECK(par.back().v_b == 14.0);
    // row-major in v_b: the second entry moves along V_A
    CHECK(par[1].v_b == 0.0);
    CHECK(par[1].v_a == doctest::Approx(1.5));
    CHECK(par.front().magnitude == 0.0);
}

TEST_CASE("finite-difference gradient: OpenMP and serial kernels agree exactly") {
    const Dynamics dyn = test::reference_dynamics();
    const TimeGrid g{0.0, 5.0, 0.25};
    test::ParameterGen gen(51);
    std::vector<double> schedule(g.intervals());
    for (double& u : schedule) u = gen.uniform(0.1, 0.9);
    const CostWeights w{10.0};
    const auto par = finite_difference_gradient(StepMethod::Trapezoidal, dyn, w, g, {1, 1}, schedule, 1e-6);
    const auto ser = finite_difference_gradient_serial(StepMethod::Trapezoidal, dyn, w, g, {1, 1}, schedule, 1e-6);
    REQUIRE(par.size() == schedule.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == ser[i]);
}
