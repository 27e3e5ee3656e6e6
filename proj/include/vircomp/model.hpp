#pragma once

#include <limits>

namespace vircomp {

// Time and density are dimensionless throughout.

/// Growth and competition parameters of the two strains. Strain B is the
/// better-adapted mutant, so k_b > k_a.
struct Phenotype {
    double r_a{};  ///< reproduction rate of strain A
    double r_b{};  ///< reproduction rate of strain B
    double k_a{};  ///< competition rate of strain A
    double k_b{};  ///< competition rate of strain B

    /// Throws ValidationError unless all rates are positive and k_a < k_b.
    void validate() const;
};

/// Treatment efficacy on each strain; the drug works better on the original
/// lineage (c_a > c_b).
struct Efficacy {
    double c_a{};
    double c_b{};

    /// Throws ValidationError unless 0 <= c_b < c_a <= 1.
    void validate() const;
};

/// Viral densities. Also serves as the 2-vector type for derivatives and costates.
struct State {
    double v_a{};
    double v_b{};

    friend constexpr State operator+(State x, State y) { return {x.v_a + y.v_a, x.v_b + y.v_b}; }
    friend constexpr State operator-(State x, State y) { return {x.v_a - y.v_a, x.v_b - y.v_b}; }
    friend constexpr State operator*(double s, State x) { return {s * x.v_a, s * x.v_b}; }
    friend constexpr bool operator==(const State&, const State&) = default;
};

using StateDerivative = State;

/// State plus the running-cost accumulator V_C.
struct AugmentedState {
    State state;
    double v_c{};
};

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11{}, a12{}, a21{}, a22{};

    [[nodiscard]] constexpr State operator*(State x) const {
        return {a11 * x.v_a + a12 * x.v_b, a21 * x.v_a + a22 * x.v_b};
    }
    [[nodiscard]] constexpr Mat2 transposed() const { return {a11, a21, a12, a22}; }
    [[nodiscard]] constexpr double trace() const { return a11 + a22; }
    [[nodiscard]] constexpr double det() const { return a11 * a22 - a12 * a21; }
};

/// Weights of the running cost (V_A - target_a)^2 + V_B^2 + u^2, optionally
/// extended by the exterior penalty mu * max(0, V_B - xi)^2.
struct CostWeights {
    double target_a{};
    double penalty_xi{std::numeric_limits<double>::infinity()};
    double penalty_mu{0.0};

    /// Default weights for a phenotype: target k_a, penalty off.
    static CostWeights for_phenotype(const Phenotype& p) { return {p.k_a}; }

    [[nodiscard]] bool penalty_active() const { return penalty_mu > 0.0; }
    void validate() const;
};

[[nodiscard]] StateDerivative rhs_free(const Phenotype& p, State s);

/// Controlled right-hand side. Throws ValidationError when u is outside [0, 1].
[[nodiscard]] StateDerivative rhs_controlled(const Phenotype& p, const Efficacy& e, State s, double u);

/// Jacobian of rhs_controlled with respect to the state (u = 0 gives the free system).
[[nodiscard]] Mat2 jacobian(const Phenotype& p, const Efficacy& e, State s, double u);

/// Partial derivative of rhs_controlled with respect to u.
[[nodiscard]] inline StateDerivative control_sensitivity(const Efficacy& e, State s) {
    return {-e.c_a * s.v_a, -e.c_b * s.v_b};
}

/// State part of the running cost, i.e. the derivative of V_C (penalty included when active).
[[nodiscard]] double state_cost(State s, const CostWeights& w);

/// Gradient of state_cost with respect to the state.
[[nodiscard]] State state_cost_gradient(State s, const CostWeights& w);

/// Full running cost: state_cost + u^2.
[[nodiscard]] double cost_integrand(State s, double u, const CostWeights& w);

/// Bundles the parameters of a controlled system so integrators can carry a single value.
struct Dynamics {
    Phenotype phenotype;
    Efficacy efficacy;

    [[nodiscard]] StateDerivative f(State s, double u) const { return rhs_controlled(phenotype, efficacy, s, u); }
    [[nodiscard]] Mat2 dfdx(State s, double u) const { return jacobian(phenotype, efficacy, s, u); }
    [[nodiscard]] StateDerivative dfdu(State s) const { return control_sensitivity(efficacy, s); }
};

}  // namespace vircomp
