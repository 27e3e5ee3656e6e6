#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vircomp {

struct CriterionResult {
    int id{};
    std::string title;
    bool passed{false};
    std::string detail;
    double seconds{};
};

/// Number of acceptance criteria.
inline constexpr int kCriterionCount = 9;

/// Directory holding the shipped scenario fixtures .
[[nodiscard]] std::filesystem::path default_fixture_dir();

/// Run every acceptance criterion (or only `only`) against the fixtures in `fixtures`.
/// Exceptions inside a criterion mark it failed with the message as detail.
[[nodiscard]] std::vector<CriterionResult> run_acceptance(const std::filesystem::path& fixtures,
                                                          std::optional<int> only = std::nullopt);

/// One `PASS`/`FAIL` line per criterion.
[[nodiscard]] std::string format_results(const std::vector<CriterionResult>& results);

}  // namespace vircomp
