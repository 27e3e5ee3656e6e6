#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vircomp/model.hpp"

namespace vircomp {

/// Eigenvalues with |lambda| <= kEigTol count as zero for the stability verdict.
inline constexpr double kEigTol = 1e-9;

enum class Verdict { Stable, Unstable, Marginal, LineDegenerate };

[[nodiscard]] std::string to_string(Verdict v);

/// An inequality "lhs < rhs" evaluated for a concrete parameter set.
struct Condition {
    std::string expr;
    double lhs{};
    double rhs{};
    bool holds{};
};

struct Eigenpair {
    double first{};
    double second{};
};

struct StabilityResult {
    Eigenpair eigenvalues;  ///< real parts when `complex` is set
    bool complex{false};
    Verdict verdict{Verdict::Marginal};
};

/// Eigenvalues of a 2x2 matrix from trace and determinant. Triangular matrices
/// return their diagonal (a11, a22) exactly.
[[nodiscard]] StabilityResult classify_stability(const Mat2& j);

/// Interior line of equilibria V_A + V_B = intercept, present only at the degenerate control.
struct EquilibriumLine {
    double intercept{};
};

struct EquilibriumReport {
    std::string label;
    State point;                          ///< the equilibrium, or the line midpoint
    std::optional<EquilibriumLine> line;  ///< set for the degenerate line
    Eigenpair eigenvalues;  ///< at boundary points, first is the V_A direction
    bool complex{false};
    Verdict verdict{Verdict::Marginal};
    std::vector<Condition> conditions;    ///< all hold exactly when the point is stable
    bool in_biological_domain{true};
    std::string note;
};

/// The three equilibria (0,0), (k_a,0), (0,k_b) of the uncontrolled system.
[[nodiscard]] std::vector<EquilibriumReport> equilibria_free(const Phenotype& p);

/// Equilibria under a constant control u in [0, 1]: the origin, both boundary
/// points (flagged when outside the non-negative quadrant) and, at the degenerate
/// control, the interior line.
[[nodiscard]] std::vector<EquilibriumReport> equilibria_constant_control(const Phenotype& p, const Efficacy& e,
                                                                         double u);

/// Control at which k_a(1 - c_a u / r_a) == k_b(1 - c_b u / r_b), if it lies in (0, 1].
[[nodiscard]] std::optional<double> find_degenerate_control(const Phenotype& p, const Efficacy& e);

/// Same as find_degenerate_control but throws NoDegenerateControl when there is none.
[[nodiscard]] double degenerate_control(const Phenotype& p, const Efficacy& e);

}  // namespace vircomp
