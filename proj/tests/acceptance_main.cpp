// Runs the acceptance criteria and prints one line per criterion.
// Usage: acceptance [quick|full] [--expected-failures 5,7]
//
// Criteria listed as expected failures still print FAIL; they only stop
// counting against the exit code.

#include "anderson/acceptance.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    using namespace anderson;
    CLI::App app{"Acceptance suite"};
    std::string profile = "quick";
    std::vector<int> expected;
    app.add_option("profile", profile)->check(CLI::IsMember({"quick", "full"}));
    app.add_option("--expected-failures", expected)->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    AcceptanceConfig cfg;
    cfg.params = profile == "full" ? ProfileParams::full() : ProfileParams::quick();
    cfg.log = [](std::string_view line) { std::cerr << line << "\n"; };
    const auto results = run_acceptance(cfg, [](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
    });

    std::vector<int> failed;
    std::vector<int> unexpected;
    for (const auto& r : results) {
        if (!r.pass) {
            failed.push_back(r.id);
            if (std::find(expected.begin(), expected.end(), r.id) == expected.end()) {
                unexpected.push_back(r.id);
            }
        }
    }
    std::cout << results.size() - failed.size() << "/" << results.size() << " criteria pass ("
              << to_string(cfg.params.profile) << " profile)";
    if (!failed.empty()) {
        std::cout << "; failing:";
        for (int id : failed) {
            std::cout << " " << id;
        }
        if (unexpected.empty()) {
            std::cout << " (all listed as expected failures)";
        }
    }
    std::cout << std::endl;
    return unexpected.empty() ? 0 : 1;
}
