#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vircomp/integrators.hpp"
#include "vircomp/model.hpp"
#include "vircomp/ocp.hpp"

namespace vircomp {

enum class Mode { Free, ConstantU, Ocp, OcpWsc };

[[nodiscard]] std::string_view to_string(Mode m);

/// Phase-portrait layout: window [0, va_max] x [0, vb_max], arrow lattice and seed grid.
struct PortraitSpec {
    double va_max{12.0};
    double vb_max{12.0};
    std::size_t arrow_resolution{15};
    std::size_t seed_resolution{5};
    double horizon{20.0};
    double dt{0.01};

    void validate() const;
};

struct Scenario {
    int schema{1};
    std::string name;
    Mode mode{Mode::Free};
    Phenotype phenotype;
    std::optional<Efficacy> efficacy;  ///< required for every mode except free
    std::optional<double> constant_u;  ///< present iff mode == ConstantU
    std::optional<double> xi;          ///< present iff mode == OcpWsc
    double u_max{1.0};
    TimeGrid grid;
    std::vector<State> initial_conditions;
    CostWeights cost;
    StepMethod method{StepMethod::Rk4};
    FbsmOptions fbsm;
    PenaltyOptions penalty;
    PortraitSpec portrait;

    /// Dynamics with zero efficacy when the scenario has none (free mode).
    [[nodiscard]] Dynamics dynamics() const { return {phenotype, efficacy.value_or(Efficacy{})}; }
    /// Control applied by `simulate`: constant_u for constant-u, otherwise 0.
    [[nodiscard]] double simulation_control() const { return constant_u.value_or(0.0); }
};

/// Flat key/value view of a scenario document. Section headers `[name]` prefix
/// the keys that follow them, so `[phenotype]` + `r_a = 3` is `phenotype.r_a`.
class ScenarioDocument {
public:
    struct Entry {
        std::string value;
        int line{0};  ///< 0 for entries set by an override
    };

    /// Throws ParseError on malformed lines or duplicate keys.
    static ScenarioDocument parse(std::string_view text);

    /// Replace or add a dotted key (`grid.dt=0.05`). Throws ParseError if malformed.
    void apply_override(std::string_view assignment);
    void set(const std::string& key, std::string value);

    [[nodiscard]] const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::map<std::string, Entry> entries_;
};

/// Validate a document into a Scenario. Throws ParseError for unknown keys or
/// unreadable values and ValidationError when a model invariant is violated.
[[nodiscard]] Scenario build_scenario(const ScenarioDocument& doc);

/// parse + overrides + build.
[[nodiscard]] Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides = {});

[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path,
                                     const std::vector<std::string>& overrides = {});

}  // namespace vircomp
