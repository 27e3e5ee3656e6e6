#include "vircomp/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vircomp/errors.hpp"

namespace vircomp {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        case Verdict::Marginal: return "marginal";
        case Verdict::LineDegenerate: return "line-degenerate";
    }
    return "unknown";
}

namespace {

Verdict verdict_for(double l1, double l2) {
    if (l1 < -kEigTol && l2 < -kEigTol) return Verdict::Stable;
    if (l1 > kEigTol || l2 > kEigTol) return Verdict::Unstable;
    return Verdict::Marginal;
}

Condition less_than(std::string expr, double lhs, double rhs) {
    return {std::move(expr), lhs, rhs, lhs < rhs};
}

// r / c, treating zero efficacy as an unreachable threshold
double ratio_or_inf(double r, double c) {
    return c > 0.0 ? r / c : std::numeric_limits<double>::infinity();
}

EquilibriumReport make_report(std::string label, const Phenotype& p, const Efficacy& e, double u, State point) {
    EquilibriumReport rep;
    rep.label = std::move(label);
    rep.point = point;
    const StabilityResult st = classify_stability(jacobian(p, e, point, u));
    rep.eigenvalues = st.eigenvalues;
    rep.complex = st.complex;
    rep.verdict = st.verdict;
    rep.in_biological_domain = point.v_a >= 0.0 && point.v_b >= 0.0;
    if (!rep.in_biological_domain) rep.note = "outside biological domain";
    return rep;
}

}  // namespace

StabilityResult classify_stability(const Mat2& j) {
    StabilityResult r;
    if (j.a12 == 0.0 || j.a21 == 0.0) {
        r.eigenvalues = {j.a11, j.a22};
    } else {
        const double half_tr = 0.5 * j.trace();
        const double disc = half_tr * half_tr - j.det();
        if (disc < 0.0) {
            r.complex = true;
            r.eigenvalues = {half_tr, half_tr};
        } else {
            const double root = std::sqrt(disc);
            // avoid cancellation in the smaller-magnitude root
            const double big = half_tr >= 0.0 ? half_tr + root : half_tr - root;
            const double small = big != 0.0 ? j.det() / big : 0.0;
            r.eigenvalues = half_tr >= 0.0 ? Eigenpair{big, small} : Eigenpair{small, big};
        }
    }
    r.verdict = verdict_for(r.eigenvalues.first, r.eigenvalues.second);
    return r;
}

std::vector<EquilibriumReport> equilibria_free(const Phenotype& p) {
    p.validate();
    const Efficacy none{};
    std::vector<EquilibriumReport> out;

    // each condition is one eigenvalue being negative; all hold iff the point is stable
    auto origin = make_report("origin", p, none, 0.0, {0.0, 0.0});
    origin.conditions = {less_than("r_a < 0", p.r_a, 0.0), less_than("r_b < 0", p.r_b, 0.0)};
    out.push_back(std::move(origin));

    auto a_only = make_report("strain-a-only", p, none, 0.0, {p.k_a, 0.0});
    a_only.conditions = {less_than("-r_a < 0", -p.r_a, 0.0),
                         less_than("r_b*(k_b - k_a)/k_b < 0", p.r_b * (p.k_b - p.k_a) / p.k_b, 0.0)};
    out.push_back(std::move(a_only));

    auto b_only = make_report("strain-b-only", p, none, 0.0, {0.0, p.k_b});
    b_only.conditions = {less_than("-r_b < 0", -p.r_b, 0.0),
                         less_than("r_a*(k_a - k_b)/k_a < 0", p.r_a * (p.k_a - p.k_b) / p.k_a, 0.0)};
    out.push_back(std::move(b_only));
    return out;
}

std::vector<EquilibriumReport> equilibria_constant_control(const Phenotype& p, const Efficacy& e, double u) {
    p.validate();
    e.validate();
    if (!(u >= 0.0 && u <= 1.0)) throw ValidationError("constant control must lie in [0, 1]");

    std::vector<EquilibriumReport> out;

    auto origin = make_report("origin", p, e, u, {0.0, 0.0});
    origin.conditions = {
        less_than("max(r_a/c_a, r_b/c_b) < u", std::max(ratio_or_inf(p.r_a, e.c_a), ratio_or_inf(p.r_b, e.c_b)), u)};
    out.push_back(std::move(origin));

    const double sum_a = p.k_a * (1.0 - e.c_a * u / p.r_a);
    auto a_only = make_report("strain-a-only", p, e, u, {sum_a, 0.0});
    a_only.conditions = {
        less_than("r_b*(1 - k_a/k_b) < (c_b - r_b*k_a*c_a/(r_a*k_b))*u", p.r_b * (1.0 - p.k_a / p.k_b),
                  (e.c_b - p.r_b * p.k_a * e.c_a / (p.r_a * p.k_b)) * u),
        less_than("u < r_a/c_a", u, ratio_or_inf(p.r_a, e.c_a)),
    };
    out.push_back(std::move(a_only));

    const double sum_b = p.k_b * (1.0 - e.c_b * u / p.r_b);
    auto b_only = make_report("strain-b-only", p, e, u, {0.0, sum_b});
    b_only.conditions = {
        less_than("r_a*(1 - k_b/k_a) < (c_a - r_a*k_b*c_b/(r_b*k_a))*u", p.r_a * (1.0 - p.k_b / p.k_a),
                  (e.c_a - p.r_a * p.k_b * e.c_b / (p.r_b * p.k_a)) * u),
        less_than("u < r_b/c_b", u, ratio_or_inf(p.r_b, e.c_b)),
    };
    out.push_back(std::move(b_only));

    // Both nullcline sums coincide only at the degenerate control.
    if (sum_a > 0.0 && std::abs(sum_a - sum_b) <= 1e-10 * std::max(1.0, std::abs(sum_a))) {
        const State mid{0.5 * sum_a, 0.5 * sum_a};
        EquilibriumReport line = make_report("coexistence-line", p, e, u, mid);
        line.line = EquilibriumLine{sum_a};
        line.verdict = Verdict::LineDegenerate;
        const double transverse = p.r_a / p.k_a * mid.v_a + p.r_b / p.k_b * mid.v_b;
        line.conditions = {less_than("0 < (r_a/k_a)*V_A + (r_b/k_b)*V_B at midpoint", 0.0, transverse)};
        line.note =
            "rank-1 Jacobian on the line: one zero eigenvalue, the other equals "
            "-((r_a/k_a)*V_A + (r_b/k_b)*V_B) < 0, so the line attracts transversally";
        out.push_back(std::move(line));
    }
    return out;
}

std::optional<double> find_degenerate_control(const Phenotype& p, const Efficacy& e) {
    const double slope_a = p.k_a * e.c_a / p.r_a;
    const double slope_b = p.k_b * e.c_b / p.r_b;
    const double den = slope_b - slope_a;
    if (std::abs(den) <= 1e-14 * std::max(std::abs(slope_a), std::abs(slope_b))) return std::nullopt;
    const double u = (p.k_b - p.k_a) / den;
    if (!(u > 0.0 && u <= 1.0)) return std::nullopt;
    return u;
}

double degenerate_control(const Phenotype& p, const Efficacy& e) {
    p.validate();
    e.validate();
    const auto u = find_degenerate_control(p, e);
    if (!u) {
        throw NoDegenerateControl("the controlled nullclines never coincide for a control in (0, 1]");
    }
    return *u;
}

}  // namespace vircomp
