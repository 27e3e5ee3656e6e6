#include "vircomp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vircomp/errors.hpp"

namespace vircomp {

ControlSchedule ControlSchedule::constant(const TimeGrid& grid, double u, double u_max) {
    grid.validate();
    return {grid, std::vector<double>(grid.intervals(), u), u_max};
}

void ControlSchedule::validate() const {
    grid.validate();
    if (!(u_max > 0.0 && u_max <= 1.0)) throw ValidationError("u_max must lie in (0, 1]");
    if (values.size() != grid.intervals()) throw GridMismatch("schedule length does not match the grid");
    for (double v : values) {
        if (!(v >= 0.0 && v <= u_max)) {
            throw ValidationError("control value " + std::to_string(v) + " outside [0, u_max]");
        }
    }
}

double objective(const Trajectory& traj, const ControlSchedule& schedule) {
    if (!(traj.grid == schedule.grid) || schedule.values.size() + 1 != traj.states.size()) {
        throw GridMismatch("trajectory and schedule are defined on different grids");
    }
    const double h = schedule.grid.step_size();
    double effort = 0.0;
    for (double u : schedule.values) effort += u * u;
    return traj.final_state().v_c + h * effort;
}

// ---------------------------------------------------------------------------
// Discrete adjoint

namespace {

State solve_transposed(const Mat2& m, State b) {
    const Mat2 t = m.transposed();
    const double det = t.det();
    return {(b.v_a * t.a22 - t.a12 * b.v_b) / det, (t.a11 * b.v_b - t.a21 * b.v_a) / det};
}

double dot(State x, State y) {
    return x.v_a * y.v_a + x.v_b * y.v_b;
}

struct BackStep {
    State costate;      // adjoint of x_n
    double control{};   // q_n
};

// Reverse-mode differentiation of one forward step x -> (x+, dV_C) with the
// adjoint `a` of x+ and unit adjoint of V_C.
BackStep back_step(StepMethod method, const Dynamics& dyn, const CostWeights& w, State x, State next, double u,
                   double h, State a) {
    switch (method) {
        case StepMethod::ExplicitEuler: {
            const Mat2 j = dyn.dfdx(x, u);
            return {a + h * (j.transposed() * a) + h * state_cost_gradient(x, w), -h * dot(a, dyn.dfdu(x))};
        }
        case StepMethod::ImplicitEuler: {
            const Mat2 j = dyn.dfdx(next, u);
            const Mat2 m{1.0 - h * j.a11, -h * j.a12, -h * j.a21, 1.0 - h * j.a22};
            const State z = solve_transposed(m, a + (0.5 * h) * state_cost_gradient(next, w));
            return {z + (0.5 * h) * state_cost_gradient(x, w), -h * dot(z, dyn.dfdu(next))};
        }
        case StepMethod::Trapezoidal: {
            const Mat2 jn = dyn.dfdx(next, u);
            const Mat2 m{1.0 - 0.5 * h * jn.a11, -0.5 * h * jn.a12, -0.5 * h * jn.a21, 1.0 - 0.5 * h * jn.a22};
            const State z = solve_transposed(m, a + (0.5 * h) * state_cost_gradient(next, w));
            const Mat2 j0 = dyn.dfdx(x, u);
            const State lam = z + (0.5 * h) * (j0.transposed() * z) + (0.5 * h) * state_cost_gradient(x, w);
            return {lam, -(0.5 * h) * dot(z, dyn.dfdu(x) + dyn.dfdu(next))};
        }
        case StepMethod::Rk4: {
            const State k1 = dyn.f(x, u);
            const State x2 = x + (0.5 * h) * k1;
            const State k2 = dyn.f(x2, u);
            const State x3 = x + (0.5 * h) * k2;
            const State k3 = dyn.f(x3, u);
            const State x4 = x + h * k3;

            const double w1 = h / 6.0;
            const double w2 = h / 3.0;
            double q = 0.0;

            // stage 4
            const State x4_bar = dyn.dfdx(x4, u).transposed() * (w1 * a) + w1 * state_cost_gradient(x4, w);
            q -= dot(w1 * a, dyn.dfdu(x4));
            // stage 3: k3 feeds x+ and x4
            const State k3_bar = w2 * a + h * x4_bar;
            const State x3_bar = dyn.dfdx(x3, u).transposed() * k3_bar + w2 * state_cost_gradient(x3, w);
            q -= dot(k3_bar, dyn.dfdu(x3));
            // stage 2
            const State k2_bar = w2 * a + (0.5 * h) * x3_bar;
            const State x2_bar = dyn.dfdx(x2, u).transposed() * k2_bar + w2 * state_cost_gradient(x2, w);
            q -= dot(k2_bar, dyn.dfdu(x2));
            // stage 1
            const State k1_bar = w1 * a + (0.5 * h) * x2_bar;
            const State x1_bar = dyn.dfdx(x, u).transposed() * k1_bar + w1 * state_cost_gradient(x, w);
            q -= dot(k1_bar, dyn.dfdu(x));

            return {a + x1_bar + x2_bar + x3_bar + x4_bar, q};
        }
    }
    throw ValidationError("unknown step method");
}

}  // namespace

AdjointTrajectory adjoint_sweep(const Dynamics& dyn, const CostWeights& w, const Trajectory& traj,
                                const ControlSchedule& schedule) {
    if (!(traj.grid == schedule.grid) || traj.controls.size() != schedule.values.size()) {
        throw GridMismatch("trajectory and schedule are defined on different grids");
    }
    const std::size_t n = schedule.values.size();
    const double h = traj.grid.step_size();

    AdjointTrajectory adj;
    adj.grid = traj.grid;
    adj.costates.assign(n + 1, State{});
    adj.control_terms.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const BackStep b = back_step(traj.method, dyn, w, traj.state(i), traj.state(i + 1), schedule.values[i], h,
                                     adj.costates[i + 1]);
        adj.costates[i] = b.costate;
        adj.control_terms[i] = b.control;
    }
    return adj;
}

std::vector<double> gradient(const ControlSchedule& schedule, const AdjointTrajectory& adj) {
    if (!(schedule.grid == adj.grid) || schedule.values.size() != adj.control_terms.size()) {
        throw GridMismatch("schedule and adjoint are defined on different grids");
    }
    const double h = schedule.grid.step_size();
    std::vector<double> g(schedule.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * h * schedule.values[i] - adj.control_terms[i];
    return g;
}

std::vector<double> scaled_stationary_control(const ControlSchedule& schedule, std::span<const double> grad,
                                              double scale) {
    if (grad.size() != schedule.values.size()) throw GridMismatch("gradient does not match the schedule");
    const double h = schedule.grid.step_size();
    std::vector<double> u(grad.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = std::clamp(schedule.values[i] - scale * grad[i] / (2.0 * h), 0.0, schedule.u_max);
    }
    return u;
}

std::vector<double> stationary_control(const AdjointTrajectory& adj, double u_max) {
    const double h = adj.grid.step_size();
    std::vector<double> u(adj.control_terms.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(adj.control_terms[i] / (2.0 * h), 0.0, u_max);
    return u;
}

double constraint_violation(const Trajectory& traj, double xi) {
    double v = 0.0;
    for (const auto& s : traj.states) v = std::max(v, s.state.v_b - xi);
    return v;
}

// ---------------------------------------------------------------------------
// Forward-backward sweep

namespace {

constexpr double kMinScale = 1e-6;
constexpr double kMaxScale = 1e6;

double l1(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

double relative_change(std::span<const double> now, std::span<const double> before) {
    double diff = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) diff += std::abs(now[i] - before[i]);
    const double norm = l1(now);
    if (norm == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / norm;
}

std::vector<double> flatten_states(const Trajectory& t) {
    std::vector<double> out;
    out.reserve(2 * t.states.size());
    for (const auto& s : t.states) {
        out.push_back(s.state.v_a);
        out.push_back(s.state.v_b);
    }
    return out;
}

std::vector<double> flatten_costates(const AdjointTrajectory& a) {
    std::vector<double> out;
    out.reserve(2 * a.costates.size());
    for (const auto& c : a.costates) {
        out.push_back(c.v_a);
        out.push_back(c.v_b);
    }
    return out;
}

double min_dominance(const Trajectory& t) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : t.states) m = std::min(m, s.state.v_a - s.state.v_b);
    return m;
}

void finalize(SolveReport& rep, const Dynamics& dyn, State init, StepMethod method) {
    rep.constraint_violation =
        rep.weights.penalty_active() ? constraint_violation(rep.trajectory, rep.weights.penalty_xi) : 0.0;
    rep.min_dominance = min_dominance(rep.trajectory);
    if (rep.weights.penalty_active()) {
        CostWeights plain = rep.weights;
        plain.penalty_mu = 0.0;
        const Trajectory t = integrate(method, dyn, rep.schedule.values, rep.schedule.grid, init, plain);
        rep.objective_unpenalized = objective(t, rep.schedule);
    } else {
        rep.objective_unpenalized = rep.objective;
    }
}

}  // namespace

SolveReport solve_fbsm(const Dynamics& dyn, const CostWeights& w, const TimeGrid& grid, State init, double u_max,
                       const FbsmOptions& opts, std::span<const double> warm_start) {
    dyn.phenotype.validate();
    dyn.efficacy.validate();
    w.validate();
    grid.validate();
    if (!(opts.omega > 0.0 && opts.omega <= 1.0)) throw ValidationError("relaxation omega must lie in (0, 1]");
    if (!(opts.min_omega > 0.0 && opts.min_omega <= opts.omega)) throw ValidationError("min_omega must lie in (0, omega]");
    if (opts.max_iter < 1) throw ValidationError("max_iter must be >= 1");
    if (!(opts.tolerance > 0.0)) throw ValidationError("tolerance must be > 0");

    ControlSchedule sched = ControlSchedule::constant(grid, 0.0, u_max);
    if (!warm_start.empty()) {
        if (warm_start.size() != sched.values.size()) throw GridMismatch("warm start does not match the grid");
        for (std::size_t i = 0; i < warm_start.size(); ++i) sched.values[i] = std::clamp(warm_start[i], 0.0, u_max);
    }
    sched.validate();

    SolveReport rep;
    rep.weights = w;
    rep.trajectory = integrate(opts.method, dyn, sched.values, grid, init, w);
    rep.objective = objective(rep.trajectory, sched);
    rep.adjoint = adjoint_sweep(dyn, w, rep.trajectory, sched);
    rep.schedule = sched;
    rep.objective_history.push_back(rep.objective);

    std::vector<double> states_old = flatten_states(rep.trajectory);
    std::vector<double> costates_old = flatten_costates(rep.adjoint);
    const double h = grid.step_size();
    std::vector<double> grad = gradient(rep.schedule, rep.adjoint);
    std::vector<double> prev_u;
    std::vector<double> prev_grad;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        double scale = 1.0;
        if (opts.spectral_scaling && !prev_u.empty()) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < grad.size(); ++i) {
                const double si = rep.schedule.values[i] - prev_u[i];
                ss += si * si;
                sy += si * (grad[i] - prev_grad[i]);
            }
            // relaxed step omega * scale / (2h) matches the BB1 step ss / sy
            if (sy > 0.0 && ss > 0.0) scale = std::clamp(2.0 * h * (ss / sy) / opts.omega, kMinScale, kMaxScale);
        }

        bool accepted = false;
        ControlSchedule trial = rep.schedule;
        Trajectory trial_traj;
        double trial_obj = 0.0;
        double omega = opts.omega;
        for (;;) {
            for (omega = opts.omega; omega >= opts.min_omega; omega *= 0.5) {
                // projection arc: equals the relaxed blend toward the stationary target wherever
                // that target is inside the bounds, and lands exactly on a bound otherwise
                trial.values = scaled_stationary_control(rep.schedule, grad, omega * scale);
                try {
                    trial_traj = integrate(opts.method, dyn, trial.values, grid, init, w);
                } catch (const SolverError&) {
                    continue;
                }
                trial_obj = objective(trial_traj, trial);
                if (trial_obj <= rep.objective) {
                    accepted = true;
                    break;
                }
            }
            if (accepted || !opts.spectral_scaling || scale <= kMinScale) break;
            scale = std::max(kMinScale, scale / 16.0);
        }
        if (!accepted) {
            // No descent left: converged if the unrelaxed sweep map is already a fixed point.
            const std::vector<double> classic = stationary_control(rep.adjoint, u_max);
            if (relative_change(classic, rep.schedule.values) < opts.tolerance) {
                rep.converged = true;
            } else {
                rep.non_monotone_stall = true;
            }
            break;
        }

        AdjointTrajectory trial_adj = adjoint_sweep(dyn, w, trial_traj, trial);
        const std::vector<double> states_new = flatten_states(trial_traj);
        const std::vector<double> costates_new = flatten_costates(trial_adj);
        const double change = std::max({relative_change(trial.values, rep.schedule.values),
                                        relative_change(states_new, states_old),
                                        relative_change(costates_new, costates_old)});

        prev_u = std::move(rep.schedule.values);
        prev_grad = std::move(grad);
        rep.schedule = std::move(trial);
        rep.trajectory = std::move(trial_traj);
        rep.adjoint = std::move(trial_adj);
        grad = gradient(rep.schedule, rep.adjoint);
        rep.objective = trial_obj;
        rep.iterations = iter;
        rep.convergence.push_back(change);
        rep.objective_history.push_back(trial_obj);
        rep.omega_history.push_back(omega);
        rep.scale_history.push_back(scale);
        states_old = states_new;
        costates_old = costates_new;

        if (change < opts.tolerance) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged && !rep.non_monotone_stall) rep.max_iterations_exceeded = true;
    finalize(rep, dyn, init, opts.method);
    return rep;
}

SolveReport solve_penalty(const Dynamics& dyn, const CostWeights& w, const TimeGrid& grid, State init, double u_max,
                          double xi, const FbsmOptions& opts, const PenaltyOptions& pen) {
    if (!(xi > 0.0)) throw ValidationError("state bound xi must be > 0");
    if (init.v_b > xi) {
        throw InfeasibleStart("initial V_B = " + std::to_string(init.v_b) + " exceeds the state bound xi = " +
                              std::to_string(xi));
    }
    if (!(pen.mu0 > 0.0) || !(pen.gamma > 1.0) || pen.rounds < 1) {
        throw ValidationError("penalty schedule needs mu0 > 0, gamma > 1 and at least one round");
    }
    const double ctol = pen.ctol_factor * xi;

    std::vector<PenaltyRound> rounds;
    std::vector<double> warm;
    SolveReport rep;
    double mu = pen.mu0;
    for (int k = 0; k < pen.rounds; ++k, mu *= pen.gamma) {
        CostWeights wk = w;
        wk.penalty_xi = xi;
        wk.penalty_mu = mu;
        rep = solve_fbsm(dyn, wk, grid, init, u_max, opts, warm);
        rounds.push_back({mu, rep.objective, rep.constraint_violation, rep.iterations});
        if (rep.constraint_violation <= ctol) break;
        warm = rep.schedule.values;
    }
    rep.rounds = std::move(rounds);
    rep.constraint_not_met = rep.constraint_violation > ctol;
    return rep;
}

}  // namespace vircomp
