#include "vircomp/integrators.hpp"

#include <algorithm>
#include <cmath>

#include "vircomp/errors.hpp"

namespace vircomp {

std::string_view to_string(StepMethod m) {
    switch (m) {
        case StepMethod::ExplicitEuler: return "explicit-euler";
        case StepMethod::ImplicitEuler: return "implicit-euler";
        case StepMethod::Trapezoidal: return "trapezoidal";
        case StepMethod::Rk4: return "rk4";
    }
    return "unknown";
}

StepMethod parse_step_method(std::string_view tag) {
    if (tag == "explicit-euler" || tag == "euler") return StepMethod::ExplicitEuler;
    if (tag == "implicit-euler") return StepMethod::ImplicitEuler;
    if (tag == "trapezoidal" || tag == "trapezoid") return StepMethod::Trapezoidal;
    if (tag == "rk4") return StepMethod::Rk4;
    throw ValidationError("unknown integration method '" + std::string(tag) +
                          "' (expected euler, implicit-euler, trapezoid or rk4)");
}

// ---------------------------------------------------------------------------
// TimeGrid

void TimeGrid::validate() const {
    if (!std::isfinite(t0) || !std::isfinite(tf) || !(t0 < tf)) throw ValidationError("time grid needs t0 < tf");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step dt must be > 0");
    const double span = tf - t0;
    const double n = std::round(span / dt);
    if (n < 1.0 || std::abs(n * dt - span) > 1e-9 * span) {
        throw ValidationError("time grid is not uniform: (tf - t0) / dt = " + std::to_string(span / dt) +
                              " is not an integer");
    }
}

std::size_t TimeGrid::intervals() const {
    return static_cast<std::size_t>(std::llround((tf - t0) / dt));
}

double TimeGrid::step_size() const {
    return (tf - t0) / static_cast<double>(intervals());
}

double TimeGrid::time(std::size_t node) const {
    const std::size_t n = intervals();
    if (node >= n) return tf;
    return t0 + static_cast<double>(node) * step_size();
}

// ---------------------------------------------------------------------------
// Steppers

namespace {

State solve2(const Mat2& a, State rhs) {
    const double det = a.det();
    return {(rhs.v_a * a.a22 - a.a12 * rhs.v_b) / det, (a.a11 * rhs.v_b - a.a21 * rhs.v_a) / det};
}

double max_abs(State x) {
    return std::max(std::abs(x.v_a), std::abs(x.v_b));
}

// Solves y = base + theta * dt * f(y, u) by Newton iteration, where base already
// contains every explicit contribution.
State newton_implicit(const Dynamics& dyn, State base, State guess, double u, double theta_dt,
                      const NewtonOptions& opt) {
    State y = guess;
    double residual = 0.0;
    for (int it = 0; it <= opt.max_iterations; ++it) {
        const State g = y - base - theta_dt * dyn.f(y, u);
        residual = max_abs(g);
        if (!std::isfinite(residual)) break;
        if (residual <= opt.residual_tol) return y;
        if (it == opt.max_iterations) break;
        const Mat2 j = dyn.dfdx(y, u);
        const Mat2 jg{1.0 - theta_dt * j.a11, -theta_dt * j.a12, -theta_dt * j.a21, 1.0 - theta_dt * j.a22};
        y = y - solve2(jg, g);
    }
    throw NewtonDivergence(opt.max_iterations, residual);
}

State predictor(const Dynamics& dyn, State s, double u, double dt) {
    const State p = s + dt * dyn.f(s, u);
    // A negative predictor tends to pull Newton onto the spurious negative root.
    if (p.v_a < 0.0 || p.v_b < 0.0) return s;
    return p;
}

}  // namespace

AugmentedStep step_augmented(StepMethod method, const Dynamics& dyn, const CostWeights& w, State s, double u,
                             double dt, const NewtonOptions& newton) {
    switch (method) {
        case StepMethod::ExplicitEuler:
            return {s + dt * dyn.f(s, u), dt * state_cost(s, w)};
        case StepMethod::ImplicitEuler: {
            const State next = newton_implicit(dyn, s, predictor(dyn, s, u, dt), u, dt, newton);
            return {next, 0.5 * dt * (state_cost(s, w) + state_cost(next, w))};
        }
        case StepMethod::Trapezoidal: {
            const State base = s + (0.5 * dt) * dyn.f(s, u);
            const State next = newton_implicit(dyn, base, predictor(dyn, s, u, dt), u, 0.5 * dt, newton);
            return {next, 0.5 * dt * (state_cost(s, w) + state_cost(next, w))};
        }
        case StepMethod::Rk4: {
            const State k1 = dyn.f(s, u);
            const State x2 = s + (0.5 * dt) * k1;
            const State k2 = dyn.f(x2, u);
            const State x3 = s + (0.5 * dt) * k2;
            const State k3 = dyn.f(x3, u);
            const State x4 = s + dt * k3;
            const State k4 = dyn.f(x4, u);
            const State next = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double dc = (dt / 6.0) * (state_cost(s, w) + 2.0 * state_cost(x2, w) +
                                            2.0 * state_cost(x3, w) + state_cost(x4, w));
            return {next, dc};
        }
    }
    throw ValidationError("unknown step method");
}

State step(StepMethod method, const Dynamics& dyn, State s, double u, double dt, const NewtonOptions& newton) {
    if (!(dt > 0.0)) throw ValidationError("step size must be > 0");
    return step_augmented(method, dyn, CostWeights{}, s, u, dt, newton).next;
}

// ---------------------------------------------------------------------------
// integrate

namespace {

double clamp_component(double v, double t, std::size_t& clamped) {
    if (v >= 0.0) return v;
    if (v >= -kNegativeTolerance) {
        ++clamped;
        return 0.0;
    }
    throw NegativeStateOverflow(t, v);
}

}  // namespace

Trajectory integrate(StepMethod method, const Dynamics& dyn, std::span<const double> schedule, const TimeGrid& grid,
                     State init, const CostWeights& w, const NewtonOptions& newton) {
    grid.validate();
    const std::size_t n = grid.intervals();
    if (schedule.size() != n) {
        throw GridMismatch("control schedule has " + std::to_string(schedule.size()) + " values but the grid has " +
                           std::to_string(n) + " intervals");
    }
    if (init.v_a < 0.0 || init.v_b < 0.0) throw ValidationError("initial state must be non-negative");

    Trajectory traj;
    traj.grid = grid;
    traj.method = method;
    traj.controls.assign(schedule.begin(), schedule.end());
    traj.states.reserve(n + 1);
    traj.states.push_back({init, 0.0});

    const double h = grid.step_size();
    State s = init;
    double v_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const AugmentedStep st = step_augmented(method, dyn, w, s, schedule[i], h, newton);
        const double t = grid.time(i + 1);
        s = {clamp_component(st.next.v_a, t, traj.clamped_components),
             clamp_component(st.next.v_b, t, traj.clamped_components)};
        v_c += st.cost_increment;
        traj.states.push_back({s, v_c});
    }
    return traj;
}

Trajectory integrate_constant(StepMethod method, const Dynamics& dyn, double u, const TimeGrid& grid, State init,
                              const CostWeights& w) {
    grid.validate();
    const std::vector<double> schedule(grid.intervals(), u);
    return integrate(method, dyn, schedule, grid, init, w);
}

// ---------------------------------------------------------------------------
// empirical_order

OrderEstimate empirical_order(StepMethod method, const OrderScenario& sc) {
    if (sc.step_sizes.size() < 3) throw ValidationError("empirical order needs at least three step sizes");
    const double finest = *std::min_element(sc.step_sizes.begin(), sc.step_sizes.end());

    auto final_state = [&](StepMethod m, double dt) {
        const TimeGrid grid{0.0, sc.t_end, dt};
        return integrate_constant(m, sc.dynamics, sc.u, grid, sc.init, CostWeights{}).final_state().state;
    };

    const State ref = final_state(StepMethod::Rk4, finest / 64.0);
    const double scale = std::max(1.0, max_abs(ref));

    OrderEstimate est;
    est.step_sizes = sc.step_sizes;
    for (double dt : sc.step_sizes) {
        const double err = max_abs(final_state(method, dt) - ref);
        if (err < 1e-13 * scale) {
            throw InsufficientResolution("error " + std::to_string(err) + " at dt=" + std::to_string(dt) +
                                         " is at the round-off floor");
        }
        est.errors.push_back(err);
    }

    // least-squares slope of log(err) vs log(dt)
    const double m = static_cast<double>(est.errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < est.errors.size(); ++i) {
        const double x = std::log(est.step_sizes[i]);
        const double y = std::log(est.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    est.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return est;
}

}  // namespace vircomp
