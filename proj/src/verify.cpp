#include "vircomp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "vircomp/equilibria.hpp"
#include "vircomp/errors.hpp"
#include "vircomp/integrators.hpp"
#include "vircomp/ocp.hpp"
#include "vircomp/parallel.hpp"
#include "vircomp/scenario.hpp"

namespace vircomp {

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool passed{true};
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << "FAILED: " << what << "; ";
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double distance(State a, State b) {
    return std::hypot(a.v_a - b.v_a, a.v_b - b.v_b);
}

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

// eigenvalues as an unordered pair
bool same_spectrum(Eigenpair got, Eigenpair want, double tol) {
    return (close(got.first, want.first, tol) && close(got.second, want.second, tol)) ||
           (close(got.first, want.second, tol) && close(got.second, want.first, tol));
}

// --- 1 ----------------------------------------------------------------------
void free_equilibria_table(const std::filesystem::path& dir, Outcome& out) {
    const Scenario sc = load_scenario(dir / "free.scenario");
    const Phenotype& p = sc.phenotype;
    const auto t0 = Clock::now();
    const auto reports = equilibria_free(p);
    const double elapsed = seconds_since(t0);

    // closed-form eigenvalues of the three free equilibria
    const Eigenpair expected[] = {{p.r_a, p.r_b},
                                  {-p.r_a, p.r_b * (p.k_b - p.k_a) / p.k_b},
                                  {-p.r_b, p.r_a * (p.k_a - p.k_b) / p.k_a}};
    const Verdict verdicts[] = {Verdict::Unstable, Verdict::Unstable, Verdict::Stable};
    out.check(reports.size() == 3, "expected exactly three equilibria");
    for (std::size_t i = 0; i < std::min<std::size_t>(3, reports.size()); ++i) {
        const auto& r = reports[i];
        out.detail << r.label << " (" << r.eigenvalues.first << ", " << r.eigenvalues.second << ") "
                   << to_string(r.verdict) << "; ";
        out.check(same_spectrum(r.eigenvalues, expected[i], 1e-12), r.label + " eigenvalues");
        out.check(r.verdict == verdicts[i], r.label + " verdict");
    }
    // literal values for the (3, 1, 10, 12) phenotype
    if (reports.size() == 3 && p.r_a == 3 && p.r_b == 1 && p.k_a == 10 && p.k_b == 12) {
        out.check(same_spectrum(reports[1].eigenvalues, {-3.0, 1.0 / 6.0}, 1e-12), "spectrum at (k_a,0) is {-3, 1/6}");
        out.check(same_spectrum(reports[2].eigenvalues, {-1.0, -3.0 / 5.0}, 1e-12), "spectrum at (0,k_b) is {-1, -3/5}");
    }
    out.detail << "runtime " << elapsed * 1e3 << " ms";
    out.check(elapsed < 1e-3, "runtime < 1 ms");
}

// --- 2 ----------------------------------------------------------------------
void free_attractor(const std::filesystem::path& dir, Outcome& out) {
    Scenario sc = load_scenario(dir / "free.scenario", {"solver.method=rk4", "grid.dt=0.01", "grid.tf=20"});
    const auto t0 = Clock::now();
    const std::vector<double> schedule(sc.grid.intervals(), 0.0);
    const auto bundle = integrate_bundle(StepMethod::Rk4, sc.dynamics(), schedule, sc.grid, sc.initial_conditions,
                                         sc.cost);
    const double elapsed = seconds_since(t0);
    out.check(sc.initial_conditions.size() == 5, "five seeded initial conditions");
    const State target{0.0, sc.phenotype.k_b};
    for (const auto& m : bundle) {
        if (!m.ok()) {
            out.check(false, "integration failed: " + m.error);
            continue;
        }
        const double d = distance(m.trajectory->final_state().state, target);
        out.detail << "(" << m.init.v_a << "," << m.init.v_b << ")->dist " << d << "; ";
        out.check(d <= 1e-3, "endpoint within 1e-3 of (0, k_b)");
    }
    out.detail << "runtime " << elapsed << " s";
    out.check(elapsed < 1.0, "runtime < 1 s");
}

// --- 3 ----------------------------------------------------------------------
void constant_control_inversion(const std::filesystem::path& dir, Outcome& out) {
    const Scenario sc = load_scenario(dir / "constant_u.scenario", {"grid.tf=80"});
    const Phenotype& p = sc.phenotype;
    const Efficacy& e = *sc.efficacy;
    const double u = *sc.constant_u;
    out.check(u == 0.733097, "fixture control u = 0.733097");

    // closed-form boundary equilibrium and its eigenvalues
    const double cu = e.c_a * u;
    const State point{-p.k_a * (cu - p.r_a) / p.r_a, 0.0};
    const double l1 = cu - p.r_a;
    const double l2 = p.r_b * (1.0 + p.k_a / (p.r_a * p.k_b) * (cu - p.r_a)) - e.c_b * u;
    out.check(close(point.v_a, 7.800709, 1e-6), "boundary point V_A* = 7.800709");
    out.check(close(l1, -2.3402127, 1e-6) && close(l2, -0.0166076, 1e-6), "formula eigenvalues");

    const auto reports = equilibria_constant_control(p, e, u);
    const auto it = std::find_if(reports.begin(), reports.end(), [](const auto& r) { return r.label == "strain-a-only"; });
    out.check(it != reports.end(), "strain-a-only equilibrium reported");
    if (it != reports.end()) {
        out.detail << "eig (" << it->eigenvalues.first << ", " << it->eigenvalues.second << ") " << to_string(it->verdict)
                   << "; ";
        out.check(close(it->eigenvalues.first, l1, 1e-6) && close(it->eigenvalues.second, l2, 1e-6),
                  "reported eigenvalues match the closed form within 1e-6");
        out.check(it->verdict == Verdict::Stable, "boundary point is stable");
    }

    const std::vector<double> schedule(sc.grid.intervals(), u);
    const auto bundle = integrate_bundle(StepMethod::Rk4, sc.dynamics(), schedule, sc.grid, sc.initial_conditions,
                                         sc.cost);
    for (const auto& m : bundle) {
        if (m.init.v_a <= 0.0) continue;
        if (!m.ok()) {
            out.check(false, "integration failed: " + m.error);
            continue;
        }
        const double d = distance(m.trajectory->final_state().state, point);
        out.detail << "(" << m.init.v_a << "," << m.init.v_b << ")->dist " << d << "; ";
        out.check(d <= 1e-2, "endpoint within 1e-2 of (7.800709, 0) at t=80");
    }
}

// --- 4 ----------------------------------------------------------------------
void degenerate_line(const std::filesystem::path& dir, Outcome& out) {
    const Scenario sc = load_scenario(dir / "constant_u.scenario");
    const Phenotype& p = sc.phenotype;
    const Efficacy& e = *sc.efficacy;
    const double u = degenerate_control(p, e);

    // independent root of the nullcline-sum difference by bisection
    auto gap = [&](double v) { return p.k_a * (1.0 - e.c_a * v / p.r_a) - p.k_b * (1.0 - e.c_b * v / p.r_b); };
    double lo = 0.0, hi = 1.0;
    out.check(gap(lo) * gap(hi) < 0.0, "nullcline gap changes sign on [0, 1]");
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(lo) * gap(mid) <= 0.0 ? hi : lo) = mid;
    }
    out.detail << "u = " << u << ", bisection " << lo << "; ";
    out.check(close(u, 2.0 / 3.0, 1e-12), "degenerate control equals 2/3");
    out.check(close(u, lo, 1e-12), "matches bisection root");

    // every point of the segment V_A + V_B = S* is a fixed point
    const double s_star = p.k_a * (1.0 - e.c_a * u / p.r_a);
    const Dynamics dyn{p, e};
    double worst = 0.0;
    constexpr int kSamples = 201;
    for (int i = 0; i < kSamples; ++i) {
        const double va = s_star * i / (kSamples - 1);
        const State d = dyn.f({va, s_star - va}, u);
        worst = std::max(worst, std::hypot(d.v_a, d.v_b));
    }
    out.detail << "max |rhs| on line " << worst << "; ";
    out.check(worst < 1e-10, "|rhs| < 1e-10 along the line");
    // off the line the residual is not zero, so the set is one-dimensional
    const State off = dyn.f({0.5 * s_star, 0.5 * s_star + 0.1}, u);
    out.check(std::hypot(off.v_a, off.v_b) > 1e-6, "points off the line are not equilibria");
}

// --- 5 ----------------------------------------------------------------------
void integrator_orders(const std::filesystem::path& dir, Outcome& out) {
    const auto t0 = Clock::now();
    const Scenario sc = load_scenario(dir / "free.scenario");
    OrderScenario os;
    os.dynamics = sc.dynamics();
    os.init = sc.initial_conditions.front();
    os.t_end = 5.0;
    os.step_sizes = {0.04, 0.02, 0.01, 0.005};
    const std::pair<StepMethod, double> expected[] = {{StepMethod::ExplicitEuler, 1.0},
                                                      {StepMethod::ImplicitEuler, 1.0},
                                                      {StepMethod::Trapezoidal, 2.0},
                                                      {StepMethod::Rk4, 4.0}};
    for (const auto& [m, order] : expected) {
        const OrderEstimate est = empirical_order(m, os);
        out.detail << to_string(m) << " " << est.order << "; ";
        out.check(std::abs(est.order - order) <= 0.3, std::string(to_string(m)) + " order");
    }

    const TimeGrid coarse{sc.grid.t0, sc.grid.tf, 0.5};
    for (const State& s : sc.initial_conditions) {
        try {
            (void)integrate_constant(StepMethod::ImplicitEuler, sc.dynamics(), 0.0, coarse, s, sc.cost);
        } catch (const SolverError& ex) {
            out.check(false, std::string("implicit Euler at dt=0.5: ") + ex.what());
        }
    }
    const double elapsed = seconds_since(t0);
    out.detail << "runtime " << elapsed << " s";
    out.check(elapsed < 10.0, "runtime < 10 s");
}

// --- 6 ----------------------------------------------------------------------
void adjoint_gradient(const std::filesystem::path& dir, Outcome& out) {
    const auto t0 = Clock::now();
    const Scenario sc = load_scenario(dir / "ocp.scenario", {"grid.dt=0.5"});
    out.check(sc.grid.intervals() == 120, "120 control intervals");
    const Dynamics dyn = sc.dynamics();
    const State init = sc.initial_conditions.front();

    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> draw(0.05, 0.95 * sc.u_max);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        ControlSchedule sched = ControlSchedule::constant(sc.grid, 0.0, sc.u_max);
        for (double& v : sched.values) v = draw(rng);
        const Trajectory traj = integrate(sc.method, dyn, sched.values, sc.grid, init, sc.cost);
        const auto g = gradient(sched, adjoint_sweep(dyn, sc.cost, traj, sched));
        const auto fd = finite_difference_gradient(sc.method, dyn, sc.cost, sc.grid, init, sched.values, 1e-6);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double rel = std::abs(g[i] - fd[i]) / std::max(std::abs(fd[i]), 1e-12);
            worst = std::max(worst, rel);
        }
    }
    const double elapsed = seconds_since(t0);
    out.detail << "worst relative difference " << worst << "; runtime " << elapsed << " s";
    out.check(worst <= 1e-4, "adjoint matches central differences within 1e-4 relative");
    out.check(elapsed < 30.0, "runtime < 30 s");
}

// --- 7 / 9 --------------------------------------------------------------------
struct OcpRun {
    Scenario scenario;
    SolveReport report;
    double seconds{};
};

OcpRun solve_ocp_fixture(const std::filesystem::path& dir) {
    OcpRun run{load_scenario(dir / "ocp.scenario"), {}, 0.0};
    const auto t0 = Clock::now();
    run.report = solve_fbsm(run.scenario.dynamics(), run.scenario.cost, run.scenario.grid,
                            run.scenario.initial_conditions.front(), run.scenario.u_max, run.scenario.fbsm);
    run.seconds = seconds_since(t0);
    return run;
}

void ocp_claim(const OcpRun& run, Outcome& out) {
    const SolveReport& r = run.report;
    out.detail << "iterations " << r.iterations << ", objective " << r.objective << ", min(V_A - V_B) "
               << r.min_dominance << "; ";
    out.check(r.converged && r.iterations <= 500, "converged within 500 iterations");
    bool monotone = true;
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
        monotone = monotone && r.objective_history[i] <= r.objective_history[i - 1];
    }
    out.check(monotone, "objective sequence non-increasing");
    out.check(r.min_dominance >= 0.0, "V_A >= V_B at every node");
    for (double v : r.schedule.values) {
        if (!(v >= 0.0 && v <= r.schedule.u_max)) {
            out.check(false, "schedule within [0, u_max]");
            break;
        }
    }

    // switch treatment off after t_f
    const Scenario& sc = run.scenario;
    const TimeGrid tail{sc.grid.tf, sc.grid.tf + 20.0, sc.grid.dt};
    const Trajectory after =
        integrate_constant(sc.method, sc.dynamics(), 0.0, tail, r.trajectory.final_state().state, sc.cost);
    bool increasing = true;
    for (std::size_t i = 1; i < after.states.size(); ++i) {
        increasing = increasing && after.state(i).v_b > after.state(i - 1).v_b;
    }
    out.detail << "V_B " << after.state(0).v_b << " -> " << after.final_state().state.v_b << " without control; ";
    out.check(increasing, "V_B strictly increasing once control stops");
    out.detail << "runtime " << run.seconds << " s";
    out.check(run.seconds < 60.0, "runtime < 1 min");
}

void kkt_pattern(const OcpRun& run, Outcome& out) {
    const SolveReport& r = run.report;
    out.check(r.converged, "solver converged");
    const auto g = gradient(r.schedule, r.adjoint);
    const double tol = run.scenario.fbsm.tolerance;
    const double u_max = r.schedule.u_max;
    std::size_t interior = 0, lower = 0, upper = 0, bad = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double u = r.schedule.values[i];
        if (std::abs(g[i]) < 10.0 * tol) {
            ++interior;
        } else if (u == 0.0 && g[i] > 0.0) {
            ++lower;
        } else if (u == u_max && g[i] < 0.0) {
            ++upper;
        } else {
            ++bad;
            worst = std::max(worst, std::abs(g[i]));
        }
    }
    out.detail << "interior " << interior << ", lower " << lower << ", upper " << upper << ", violating " << bad;
    if (bad) out.detail << " (worst |g| " << worst << ")";
    out.check(bad == 0, "discrete KKT sign pattern");
}

// --- 8 ----------------------------------------------------------------------
void ocp_wsc_claim(const std::filesystem::path& dir, Outcome& out) {
    const auto t0 = Clock::now();
    const Scenario sc = load_scenario(dir / "ocp_wsc.scenario");
    const double xi = *sc.xi;
    out.check(xi == 0.5, "fixture xi = 0.5");
    const State init = sc.initial_conditions.front();
    const SolveReport r = solve_penalty(sc.dynamics(), sc.cost, sc.grid, init, sc.u_max, xi, sc.fbsm, sc.penalty);
    out.detail << "violation " << r.constraint_violation << " after " << r.rounds.size() << " rounds (";
    for (const auto& rd : r.rounds) out.detail << rd.constraint_violation << " ";
    out.detail << "); ";
    out.check(r.constraint_violation <= 1e-3 * xi, "max node violation <= 1e-3 * xi");
    for (std::size_t i = 1; i < r.rounds.size(); ++i) {
        if (r.rounds[i].constraint_violation > r.rounds[i - 1].constraint_violation) {
            out.check(false, "violation non-increasing across rounds");
            break;
        }
    }

    const double loose = sc.phenotype.k_b + 1.0;
    const SolveReport inactive =
        solve_penalty(sc.dynamics(), sc.cost, sc.grid, init, sc.u_max, loose, sc.fbsm, sc.penalty);
    const SolveReport plain = solve_fbsm(sc.dynamics(), sc.cost, sc.grid, init, sc.u_max, sc.fbsm);
    const double diff = std::abs(inactive.objective - plain.objective);
    out.detail << "xi > k_b objective gap " << diff << "; ";
    out.check(diff <= 1e-3 * std::max(1.0, std::abs(plain.objective)), "inactive constraint reproduces the OCP");
    const double elapsed = seconds_since(t0);
    out.detail << "runtime " << elapsed << " s";
    out.check(elapsed < 120.0, "runtime < 2 min");
}

}  // namespace

std::filesystem::path default_fixture_dir() {
#ifdef VIRCOMP_SCENARIO_DIR
    return VIRCOMP_SCENARIO_DIR;
#else
    return "scenarios";
#endif
}

std::vector<CriterionResult> run_acceptance(const std::filesystem::path& fixtures, std::optional<int> only) {
    std::optional<OcpRun> ocp_cached;
    auto ocp_run = [&]() -> const OcpRun& {
        if (!ocp_cached) ocp_cached = solve_ocp_fixture(fixtures);
        return *ocp_cached;
    };

    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"closed-form equilibria of the free system", [&](Outcome& o) { free_equilibria_table(fixtures, o); }},
        {"free-system attractor (0, k_b)", [&](Outcome& o) { free_attractor(fixtures, o); }},
        {"constant-control inversion to (7.800709, 0)", [&](Outcome& o) { constant_control_inversion(fixtures, o); }},
        {"degenerate control and line of equilibria", [&](Outcome& o) { degenerate_line(fixtures, o); }},
        {"integrator orders and implicit Euler at dt=0.5", [&](Outcome& o) { integrator_orders(fixtures, o); }},
        {"adjoint gradient vs finite differences", [&](Outcome& o) { adjoint_gradient(fixtures, o); }},
        {"OCP: mutant never outperforms the original strain", [&](Outcome& o) { ocp_claim(ocp_run(), o); }},
        {"OCP-WSC: V_B kept below xi", [&](Outcome& o) { ocp_wsc_claim(fixtures, o); }},
        {"discrete KKT pattern at the OCP solution", [&](Outcome& o) { kkt_pattern(ocp_run(), o); }},
    };

    std::vector<CriterionResult> results;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (only && *only != id) continue;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& ex) {
            o.passed = false;
            o.detail << "exception: " << ex.what();
        }
        results.push_back({id, criteria[i].first, o.passed, o.detail.str(), seconds_since(t0)});
    }
    return results;
}

std::string format_results(const std::vector<CriterionResult>& results) {
    std::ostringstream s;
    for (const auto& r : results) {
        s << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.title << " (" << r.seconds << " s)\n"
          << "        " << r.detail << "\n";
    }
    return s.str();
}

}  // namespace vircomp
