#include "vircomp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vircomp/errors.hpp"

namespace vircomp {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be a positive finite number, got " + std::to_string(v));
    }
}

}  // namespace

void Phenotype::validate() const {
    require_positive(r_a, "r_a");
    require_positive(r_b, "r_b");
    require_positive(k_a, "k_a");
    require_positive(k_b, "k_b");
    if (!(k_a < k_b)) {
        throw ValidationError("k_a must be < k_b (strain B is the better-adapted mutant), got k_a=" +
                              std::to_string(k_a) + ", k_b=" + std::to_string(k_b));
    }
}

void Efficacy::validate() const {
    if (!(c_b >= 0.0) || !(c_a <= 1.0)) {
        throw ValidationError("efficacies must lie in [0, 1], got c_a=" + std::to_string(c_a) +
                              ", c_b=" + std::to_string(c_b));
    }
    if (!(c_b < c_a)) {
        throw ValidationError("c_a must be > c_b (treatment works better on strain A), got c_a=" +
                              std::to_string(c_a) + ", c_b=" + std::to_string(c_b));
    }
}

void CostWeights::validate() const {
    if (!std::isfinite(target_a)) throw ValidationError("target_a must be finite");
    if (!(penalty_xi > 0.0)) throw ValidationError("penalty_xi must be > 0");
    if (!(penalty_mu >= 0.0) || !std::isfinite(penalty_mu)) throw ValidationError("penalty_mu must be >= 0");
}

StateDerivative rhs_free(const Phenotype& p, State s) {
    const double sum = s.v_a + s.v_b;
    return {p.r_a * (1.0 - sum / p.k_a) * s.v_a, p.r_b * (1.0 - sum / p.k_b) * s.v_b};
}

StateDerivative rhs_controlled(const Phenotype& p, const Efficacy& e, State s, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw ValidationError("control value must lie in [0, 1], got " + std::to_string(u));
    }
    const StateDerivative free = rhs_free(p, s);
    if (u == 0.0) return free;
    return {free.v_a - e.c_a * u * s.v_a, free.v_b - e.c_b * u * s.v_b};
}

Mat2 jacobian(const Phenotype& p, const Efficacy& e, State s, double u) {
    return {
        p.r_a * (1.0 - (2.0 * s.v_a + s.v_b) / p.k_a) - e.c_a * u,
        -p.r_a * s.v_a / p.k_a,
        -p.r_b * s.v_b / p.k_b,
        p.r_b * (1.0 - (s.v_a + 2.0 * s.v_b) / p.k_b) - e.c_b * u,
    };
}

double state_cost(State s, const CostWeights& w) {
    const double da = s.v_a - w.target_a;
    double c = da * da + s.v_b * s.v_b;
    if (w.penalty_active()) {
        const double excess = std::max(0.0, s.v_b - w.penalty_xi);
        c += w.penalty_mu * excess * excess;
    }
    return c;
}

State state_cost_gradient(State s, const CostWeights& w) {
    State g{2.0 * (s.v_a - w.target_a), 2.0 * s.v_b};
    if (w.penalty_active()) {
        g.v_b += 2.0 * w.penalty_mu * std::max(0.0, s.v_b - w.penalty_xi);
    }
    return g;
}

double cost_integrand(State s, double u, const CostWeights& w) {
    return state_cost(s, w) + u * u;
}

}  // namespace vircomp
