#include "vircomp/parallel.hpp"

#include <cmath>
#include <cstdint>

#include "vircomp/errors.hpp"

namespace vircomp {

namespace {

BundleMember integrate_member(StepMethod method, const Dynamics& dyn, std::span<const double> schedule,
                              const TimeGrid& grid, State init, const CostWeights& w) {
    BundleMember m;
    m.init = init;
    try {
        m.trajectory = integrate(method, dyn, schedule, grid, init, w);
    } catch (const std::exception& ex) {
        m.error = ex.what();
    }
    return m;
}

Arrow make_arrow(const Dynamics& dyn, double u, State at) {
    const State d = dyn.f(at, u);
    const double mag = std::hypot(d.v_a, d.v_b);
    Arrow a{at.v_a, at.v_b, 0.0, 0.0, mag};
    if (mag > 0.0) {
        a.dir_a = d.v_a / mag;
        a.dir_b = d.v_b / mag;
    }
    return a;
}

State lattice_point(std::size_t k, double va_max, double vb_max, std::size_t nx, std::size_t ny) {
    const std::size_t i = k % nx;
    const std::size_t j = k / nx;
    const double x = nx > 1 ? va_max * static_cast<double>(i) / static_cast<double>(nx - 1) : 0.0;
    const double y = ny > 1 ? vb_max * static_cast<double>(j) / static_cast<double>(ny - 1) : 0.0;
    return {x, y};
}

void check_field_args(double va_max, double vb_max, std::size_t nx, std::size_t ny) {
    if (!(va_max > 0.0) || !(vb_max > 0.0)) throw ValidationError("portrait window must be positive");
    if (nx == 0 || ny == 0) throw ValidationError("arrow lattice needs at least one point per axis");
}

double perturbed_objective(StepMethod method, const Dynamics& dyn, const CostWeights& w, const TimeGrid& grid,
                           State init, std::vector<double>& u, std::size_t i, double delta) {
    const double saved = u[i];
    u[i] = saved + delta;
    const Trajectory t = integrate(method, dyn, u, grid, init, w);
    double effort = 0.0;
    for (double v : u) effort += v * v;
    u[i] = saved;
    return t.final_state().v_c + grid.step_size() * effort;
}

}  // namespace

std::vector<BundleMember> integrate_bundle(StepMethod method, const Dynamics& dyn, std::span<const double> schedule,
                                           const TimeGrid& grid, std::span<const State> inits, const CostWeights& w) {
    std::vector<BundleMember> out(inits.size());
    const auto n = static_cast<std::int64_t>(inits.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < n; ++k) {
        out[k] = integrate_member(method, dyn, schedule, grid, inits[k], w);
    }
    return out;
}

std::vector<BundleMember> integrate_bundle_serial(StepMethod method, const Dynamics& dyn,
                                                  std::span<const double> schedule, const TimeGrid& grid,
                                                  std::span<const State> inits, const CostWeights& w) {
    std::vector<BundleMember> out;
    out.reserve(inits.size());
    for (const State& s : inits) out.push_back(integrate_member(method, dyn, schedule, grid, s, w));
    return out;
}

std::vector<Arrow> arrow_field(const Dynamics& dyn, double u, double va_max, double vb_max, std::size_t nx,
                               std::size_t ny) {
    check_field_args(va_max, vb_max, nx, ny);
    std::vector<Arrow> out(nx * ny);
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for
    for (std::int64_t k = 0; k < n; ++k) {
        out[k] = make_arrow(dyn, u, lattice_point(static_cast<std::size_t>(k), va_max, vb_max, nx, ny));
    }
    return out;
}

std::vector<Arrow> arrow_field_serial(const Dynamics& dyn, double u, double va_max, double vb_max, std::size_t nx,
                                      std::size_t ny) {
    check_field_args(va_max, vb_max, nx, ny);
    std::vector<Arrow> out;
    out.reserve(nx * ny);
    for (std::size_t k = 0; k < nx * ny; ++k) out.push_back(make_arrow(dyn, u, lattice_point(k, va_max, vb_max, nx, ny)));
    return out;
}

std::vector<double> finite_difference_gradient(StepMethod method, const Dynamics& dyn, const CostWeights& w,
                                               const TimeGrid& grid, State init, std::span<const double> schedule,
                                               double h) {
    std::vector<double> g(schedule.size());
    const auto n = static_cast<std::int64_t>(schedule.size());
#pragma omp parallel
    {
        std::vector<double> u(schedule.begin(), schedule.end());
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const double fp = perturbed_objective(method, dyn, w, grid, init, u, static_cast<std::size_t>(i), h);
            const double fm = perturbed_objective(method, dyn, w, grid, init, u, static_cast<std::size_t>(i), -h);
            g[i] = (fp - fm) / (2.0 * h);
        }
    }
    return g;
}

std::vector<double> finite_difference_gradient_serial(StepMethod method, const Dynamics& dyn, const CostWeights& w,
                                                      const TimeGrid& grid, State init,
                                                      std::span<const double> schedule, double h) {
    std::vector<double> u(schedule.begin(), schedule.end());
    std::vector<double> g(schedule.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double fp = perturbed_objective(method, dyn, w, grid, init, u, i, h);
        const double fm = perturbed_objective(method, dyn, w, grid, init, u, i, -h);
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace vircomp
