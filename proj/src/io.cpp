#include "vircomp/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "vircomp/errors.hpp"

namespace vircomp {

using nlohmann::json;

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

std::string write_trajectory_csv(const Trajectory& traj, const CostWeights& w) {
    std::string out = "t,v_a,v_b,u,cost_rate,v_c\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const AugmentedState& s = traj.states[i];
        const double u = i == 0 ? 0.0 : traj.controls[i - 1];
        out += format_double(traj.grid.time(i));
        out += ',';
        out += format_double(s.state.v_a);
        out += ',';
        out += format_double(s.state.v_b);
        out += ',';
        if (i > 0) out += format_double(u);
        out += ',';
        out += format_double(cost_integrand(s.state, u, w));
        out += ',';
        out += format_double(s.v_c);
        out += '\n';
    }
    return out;
}

namespace {

double parse_cell(std::string_view cell, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError("bad number '" + std::string(cell) + "' in trajectory CSV", line);
    }
    return v;
}

}  // namespace

TrajectoryCsv read_trajectory_csv(std::string_view text) {
    TrajectoryCsv out;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || line != "t,v_a,v_b,u,cost_rate,v_c") {
        throw ParseError("trajectory CSV must start with the header t,v_a,v_b,u,cost_rate,v_c", 1);
    }
    line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (cells.size() != 6) throw ParseError("expected 6 columns", line_no);
        out.t.push_back(parse_cell(cells[0], line_no));
        out.v_a.push_back(parse_cell(cells[1], line_no));
        out.v_b.push_back(parse_cell(cells[2], line_no));
        out.u.push_back(cells[3].empty() ? std::nullopt : std::optional<double>(parse_cell(cells[3], line_no)));
        out.cost_rate.push_back(parse_cell(cells[4], line_no));
        out.v_c.push_back(parse_cell(cells[5], line_no));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const EquilibriumReport& r) {
    json conditions = json::array();
    for (const Condition& c : r.conditions) {
        conditions.push_back({{"expr", c.expr}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
    }
    json j = {
        {"label", r.label},
        {"point", {r.point.v_a, r.point.v_b}},
        {"eigenvalues", {r.eigenvalues.first, r.eigenvalues.second}},
        {"complex_eigenvalues", r.complex},
        {"verdict", to_string(r.verdict)},
        {"in_biological_domain", r.in_biological_domain},
        {"conditions", conditions},
    };
    if (r.line) j["line"] = {{"sum", r.line->intercept}, {"intercepts", {{r.line->intercept, 0.0}, {0.0, r.line->intercept}}}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json to_json(const std::vector<EquilibriumReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

json to_json(const SolveReport& r) {
    json rounds = json::array();
    for (const PenaltyRound& p : r.rounds) {
        rounds.push_back({{"mu", p.mu},
                          {"objective", p.objective},
                          {"constraint_violation", p.constraint_violation},
                          {"iterations", p.iterations}});
    }
    json weights = {{"target_a", r.weights.target_a}, {"penalty_mu", r.weights.penalty_mu}};
    if (std::isfinite(r.weights.penalty_xi)) weights["penalty_xi"] = r.weights.penalty_xi;
    const AugmentedState& last = r.trajectory.final_state();
    return {
        {"objective", r.objective},
        {"objective_unpenalized", r.objective_unpenalized},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"max_iterations_exceeded", r.max_iterations_exceeded},
        {"non_monotone_stall", r.non_monotone_stall},
        {"constraint_not_met", r.constraint_not_met},
        {"constraint_violation", r.constraint_violation},
        {"min_dominance", r.min_dominance},
        {"convergence", r.convergence},
        {"objective_history", r.objective_history},
        {"weights", weights},
        {"u_max", r.schedule.u_max},
        {"method", to_string(r.trajectory.method)},
        {"grid", {{"t0", r.schedule.grid.t0}, {"tf", r.schedule.grid.tf}, {"dt", r.schedule.grid.dt}}},
        {"final_state", {last.state.v_a, last.state.v_b, last.v_c}},
        {"penalty_rounds", rounds},
    };
}

}  // namespace vircomp
