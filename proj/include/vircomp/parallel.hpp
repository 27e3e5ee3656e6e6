#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial twin with identical
// results; tests compare the two and the bench target times them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vircomp/integrators.hpp"
#include "vircomp/model.hpp"

namespace vircomp {

/// Outcome of one trajectory in a bundle; a failed member keeps its error text.
struct BundleMember {
    State init;
    std::optional<Trajectory> trajectory;
    std::string error;

    [[nodiscard]] bool ok() const { return trajectory.has_value(); }
};

[[nodiscard]] std::vector<BundleMember> integrate_bundle(StepMethod method, const Dynamics& dyn,
                                                         std::span<const double> schedule, const TimeGrid& grid,
                                                         std::span<const State> inits, const CostWeights& w);

[[nodiscard]] std::vector<BundleMember> integrate_bundle_serial(StepMethod method, const Dynamics& dyn,
                                                                std::span<const double> schedule, const TimeGrid& grid,
                                                                std::span<const State> inits, const CostWeights& w);

struct Arrow {
    double v_a{};
    double v_b{};
    double dir_a{};  ///< unit direction (zero where the field vanishes)
    double dir_b{};
    double magnitude{};
};

/// Direction field on an nx-by-ny lattice spanning [0, va_max] x [0, vb_max], row-major in v_b.
[[nodiscard]] std::vector<Arrow> arrow_field(const Dynamics& dyn, double u, double va_max, double vb_max,
                                             std::size_t nx, std::size_t ny);

[[nodiscard]] std::vector<Arrow> arrow_field_serial(const Dynamics& dyn, double u, double va_max, double vb_max,
                                                    std::size_t nx, std::size_t ny);

/// Central finite differences of objective() with respect to every schedule value.
/// Only the forward integrator is involved, so this is independent of the adjoint.
[[nodiscard]] std::vector<double> finite_difference_gradient(StepMethod method, const Dynamics& dyn,
                                                             const CostWeights& w, const TimeGrid& grid, State init,
                                                             std::span<const double> schedule, double h);

[[nodiscard]] std::vector<double> finite_difference_gradient_serial(StepMethod method, const Dynamics& dyn,
                                                                    const CostWeights& w, const TimeGrid& grid,
                                                                    State init, std::span<const double> schedule,
                                                                    double h);

}  // namespace vircomp
