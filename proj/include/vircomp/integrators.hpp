#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vircomp/model.hpp"

namespace vircomp {

enum class StepMethod { ExplicitEuler, ImplicitEuler, Trapezoidal, Rk4 };

inline constexpr StepMethod kAllMethods[] = {StepMethod::ExplicitEuler, StepMethod::ImplicitEuler,
                                             StepMethod::Trapezoidal, StepMethod::Rk4};

[[nodiscard]] std::string_view to_string(StepMethod m);

/// Accepts the canonical tags (explicit-euler, implicit-euler, trapezoidal, rk4)
/// and the short CLI aliases (euler, trapezoid). Throws ValidationError otherwise.
[[nodiscard]] StepMethod parse_step_method(std::string_view tag);

/// Uniform grid on [t0, tf] whose span is an integer multiple of dt.
struct TimeGrid {
    double t0{};
    double tf{};
    double dt{};

    void validate() const;
    [[nodiscard]] std::size_t intervals() const;
    /// Exact step (tf - t0) / intervals(); equals dt up to rounding.
    [[nodiscard]] double step_size() const;
    /// Node time; the last node is exactly tf.
    [[nodiscard]] double time(std::size_t node) const;
    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct NewtonOptions {
    double residual_tol = 1e-12;
    int max_iterations = 25;
};

/// Components in [-kNegativeTolerance, 0) are clamped to zero; anything lower is an error.
inline constexpr double kNegativeTolerance = 1e-9;

struct Trajectory {
    TimeGrid grid;
    std::vector<AugmentedState> states;  ///< one per node
    std::vector<double> controls;        ///< one per interval (zero-order hold)
    StepMethod method{StepMethod::Rk4};
    std::size_t clamped_components{0};

    [[nodiscard]] const State& state(std::size_t node) const { return states[node].state; }
    [[nodiscard]] const AugmentedState& final_state() const { return states.back(); }
};

/// One step of the named scheme. Implicit schemes use Newton iteration with the
/// analytic Jacobian; they throw NewtonDivergence if the solve fails.
[[nodiscard]] State step(StepMethod method, const Dynamics& dyn, State s, double u, double dt,
                         const NewtonOptions& newton = {});

struct AugmentedStep {
    State next;
    double cost_increment;
};

/// Step plus the matching increment of V_C: left endpoint for explicit Euler,
/// trapezoid for the implicit schemes, the RK4 stage sum for RK4.
[[nodiscard]] AugmentedStep step_augmented(StepMethod method, const Dynamics& dyn, const CostWeights& w, State s,
                                           double u, double dt, const NewtonOptions& newton = {});

/// March the controlled system over the grid with a per-interval control schedule.
/// V_C starts at zero. Throws GridMismatch when the schedule length is wrong.
[[nodiscard]] Trajectory integrate(StepMethod method, const Dynamics& dyn, std::span<const double> schedule,
                                   const TimeGrid& grid, State init, const CostWeights& w,
                                   const NewtonOptions& newton = {});

/// Convenience overload for a constant control.
[[nodiscard]] Trajectory integrate_constant(StepMethod method, const Dynamics& dyn, double u, const TimeGrid& grid,
                                            State init, const CostWeights& w);

struct OrderScenario {
    Dynamics dynamics;
    State init;
    double u{0.0};
    double t_end{5.0};
    std::vector<double> step_sizes;  ///< at least three, coarse to fine
};

struct OrderEstimate {
    double order{};
    std::vector<double> step_sizes;
    std::vector<double> errors;  ///< max-norm error of the final state
};

/// Least-squares slope of log(error) against log(dt), errors measured against an
/// RK4 reference at the finest step divided by 64. Throws InsufficientResolution
/// if an error sits at the round-off floor.
[[nodiscard]] OrderEstimate empirical_order(StepMethod method, const OrderScenario& scenario);

}  // namespace vircomp
