#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vircomp/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria for the viral competition library"};
    std::optional<int> criterion;
    std::string fixtures = vircomp::default_fixture_dir().string();
    app.add_option("--criterion", criterion, "run only this criterion")
        ->check(CLI::Range(1, vircomp::kCriterionCount));
    app.add_option("--fixtures", fixtures, "scenario fixture directory")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const auto results = vircomp::run_acceptance(fixtures, criterion);
    std::cout << vircomp::format_results(results);
    for (const auto& r : results) {
        if (!r.passed) return 1;
    }
    return 0;
}
