#pragma once

#include <cmath>
#include <random>

#include "vircomp/model.hpp"

namespace vircomp::test {

inline Phenotype reference_phenotype() { return {3.0, 1.0, 10.0, 12.0}; }
inline Efficacy reference_efficacy() { return {0.9, 0.5}; }
inline Dynamics reference_dynamics() { return {reference_phenotype(), reference_efficacy()}; }

/// Random admissible parameters: rates in [0.8, 3], k_b / k_a in [1.3, 2].
struct ParameterGen {
    std::mt19937 rng;
    explicit ParameterGen(unsigned seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    Phenotype phenotype() {
        const double k_a = uniform(2.0, 20.0);
        return {uniform(0.8, 3.0), uniform(0.8, 3.0), k_a, k_a * uniform(1.3, 2.0)};
    }
    Efficacy efficacy() {
        const double c_a = uniform(0.2, 1.0);
        return {c_a, c_a * uniform(0.0, 0.95)};
    }
    State state(double hi) { return {uniform(0.0, hi), uniform(0.0, hi)}; }
};

inline double dist(State a, State b) { return std::hypot(a.v_a - b.v_a, a.v_b - b.v_b); }

}  // namespace vircomp::test
