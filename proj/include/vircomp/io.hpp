#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vircomp/equilibria.hpp"
#include "vircomp/integrators.hpp"
#include "vircomp/ocp.hpp"

namespace vircomp {

/// Shortest decimal text that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);

/// CSV with header `t,v_a,v_b,u,cost_rate,v_c`, one row per node. Column u holds the
/// control of the interval ending at that node (empty on row 0); cost_rate is the
/// running cost at the node with that control.
[[nodiscard]] std::string write_trajectory_csv(const Trajectory& traj, const CostWeights& w);

struct TrajectoryCsv {
    std::vector<double> t;
    std::vector<double> v_a;
    std::vector<double> v_b;
    std::vector<std::optional<double>> u;
    std::vector<double> cost_rate;
    std::vector<double> v_c;
};

/// Parses a document produced by write_trajectory_csv. Throws ParseError.
[[nodiscard]] TrajectoryCsv read_trajectory_csv(std::string_view text);

[[nodiscard]] nlohmann::json to_json(const EquilibriumReport& r);
[[nodiscard]] nlohmann::json to_json(const std::vector<EquilibriumReport>& reports);
[[nodiscard]] nlohmann::json to_json(const SolveReport& r);

}  // namespace vircomp
