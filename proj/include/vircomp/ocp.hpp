#pragma once

#include <span>
#include <vector>

#include "vircomp/integrators.hpp"
#include "vircomp/model.hpp"

namespace vircomp {

/// Piecewise-constant control, one value per grid interval, each in [0, u_max].
struct ControlSchedule {
    TimeGrid grid;
    std::vector<double> values;
    double u_max{1.0};

    static ControlSchedule constant(const TimeGrid& grid, double u, double u_max);
    /// Throws ValidationError on a bound violation, GridMismatch on a length mismatch.
    void validate() const;
};

/// Costates of the discretized problem, one pair per node, plus the per-interval
/// control sensitivity q_i = -(dynamics part of dJ/du_i). The gradient is
/// g_i = 2 h u_i - q_i.
struct AdjointTrajectory {
    TimeGrid grid;
    std::vector<State> costates;
    std::vector<double> control_terms;
};

/// V_C(t_f) plus the quadrature of u^2 (exact for a zero-order-hold schedule).
[[nodiscard]] double objective(const Trajectory& traj, const ControlSchedule& schedule);

/// Backward sweep of the discrete adjoint of the forward scheme used for `traj`.
/// Terminal costates are zero.
[[nodiscard]] AdjointTrajectory adjoint_sweep(const Dynamics& dyn, const CostWeights& w, const Trajectory& traj,
                                              const ControlSchedule& schedule);

/// Exact gradient of objective() with respect to each schedule value.
[[nodiscard]] std::vector<double> gradient(const ControlSchedule& schedule, const AdjointTrajectory& adj);

/// Pointwise stationarity update clamp(q_i / (2h), 0, u_max).
[[nodiscard]] std::vector<double> stationary_control(const AdjointTrajectory& adj, double u_max);

/// Scaled target clamp(u_i - scale * g_i / (2h), 0, u_max); scale 1 equals stationary_control.
[[nodiscard]] std::vector<double> scaled_stationary_control(const ControlSchedule& schedule,
                                                            std::span<const double> grad, double scale);

struct FbsmOptions {
    StepMethod method{StepMethod::Rk4};
    double omega{0.5};
    double min_omega{1.0 / 64.0};
    int max_iter{500};
    double tolerance{1e-4};
    /// Scale the stationarity target with a Barzilai-Borwein step; scale 1 is the
    /// classic sweep update.
    bool spectral_scaling{true};
};

struct PenaltyOptions {
    double mu0{10.0};
    double gamma{10.0};
    int rounds{5};
    double ctol_factor{1e-3};  ///< accepted violation = ctol_factor * xi
};

struct PenaltyRound {
    double mu{};
    double objective{};
    double constraint_violation{};
    int iterations{};
};

struct SolveReport {
    ControlSchedule schedule;
    Trajectory trajectory;
    AdjointTrajectory adjoint;
    CostWeights weights;
    double objective{};              ///< with the weights above (penalty included)
    double objective_unpenalized{};  ///< same schedule, penalty switched off
    int iterations{};
    std::vector<double> convergence;  ///< relative change per accepted iteration
    std::vector<double> objective_history;
    std::vector<double> omega_history;
    std::vector<double> scale_history;
    double constraint_violation{};  ///< max over nodes of max(0, V_B - xi)
    double min_dominance{};         ///< min over nodes of V_A - V_B
    bool converged{false};
    bool max_iterations_exceeded{false};
    bool non_monotone_stall{false};
    bool constraint_not_met{false};
    std::vector<PenaltyRound> rounds;

    [[nodiscard]] bool ok() const { return converged && !constraint_not_met; }
};

/// Relaxed forward-backward sweep with halving backtracking on the relaxation. Each
/// trial is u - omega * (u - target) projected onto [0, u_max], so bounds are hit exactly.
/// `warm_start` (optional) seeds the iteration; the default is u = 0.
[[nodiscard]] SolveReport solve_fbsm(const Dynamics& dyn, const CostWeights& w, const TimeGrid& grid, State init,
                                     double u_max, const FbsmOptions& opts = {},
                                     std::span<const double> warm_start = {});

/// Quadratic-penalty outer loop for the state bound V_B <= xi, warm-starting each
/// round from the previous one. Throws InfeasibleStart if V_B(0) > xi.
[[nodiscard]] SolveReport solve_penalty(const Dynamics& dyn, const CostWeights& w, const TimeGrid& grid, State init,
                                        double u_max, double xi, const FbsmOptions& opts = {},
                                        const PenaltyOptions& pen = {});

/// Max over nodes of max(0, V_B - xi).
[[nodiscard]] double constraint_violation(const Trajectory& traj, double xi);

}  // namespace vircomp
