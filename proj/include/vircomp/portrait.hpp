#pragma once

#include <string>
#include <vector>

#include "vircomp/equilibria.hpp"
#include "vircomp/parallel.hpp"
#include "vircomp/scenario.hpp"

namespace vircomp {

struct SeedPath {
    State seed;
    std::vector<State> points;  ///< subsampled path, seed first, endpoint last
    bool ok{false};
    std::string error;
};

struct PortraitData {
    PortraitSpec spec;
    double u{};
    std::vector<Arrow> arrows;
    std::vector<SeedPath> bundle;
    std::vector<EquilibriumReport> equilibria;
};

/// Seeds at the cell centres of a res-by-res partition of the window.
[[nodiscard]] std::vector<State> portrait_seeds(const PortraitSpec& spec);

/// Arrow field, seed bundle and equilibrium overlay for a constant control u.
/// A seed whose integration fails is marked failed; the rest of the portrait is kept.
/// Without an efficacy only u = 0 is meaningful and the free equilibria are used.
[[nodiscard]] PortraitData phase_portrait(const Phenotype& p, const std::optional<Efficacy>& e, double u,
                                          const PortraitSpec& spec, StepMethod method = StepMethod::Rk4);

/// Sections `# arrows`, `# trajectories`, `# equilibria`, each with its own header row.
[[nodiscard]] std::string portrait_csv(const PortraitData& data);

/// SVG 1.1 rendering: arrows, one polyline per seed, one circle marker per equilibrium.
[[nodiscard]] std::string portrait_svg(const PortraitData& data);

}  // namespace vircomp
