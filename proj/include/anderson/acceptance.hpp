#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace anderson {

enum class Profile { Quick, Full };

struct ProfileParams {
    Profile profile = Profile::Quick;
    double L_small = 50.0;
    double L_large = 200.0;
    double L_calibration = 100.0;     ///< C_emp of criterion 9; needs a_L > 1
    std::size_t reps = 100;           ///< ensemble replicas for criteria 7-10
    std::size_t explosion_reps = 100; ///< criterion 5
    double band_scale = 2.0;
    double dx = 1e-3;

    static ProfileParams quick();
    static ProfileParams full();
};

struct AcceptanceConfig {
    ProfileParams params = ProfileParams::quick();
    std::uint64_t seed = 20240611;
    int jobs = 0;
    /// Criteria to run (1..11); empty runs all.
    std::vector<int> only;
    /// Progress lines; nothing is printed when empty.
    std::function<void(std::string_view)> log;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the requested criteria in order; on_result is called as each finishes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceConfig& cfg,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS]  3 name (0.12 s): detail"
std::string format_result(const CriterionResult& r);

/// {"schema", "profile", "pass", "criteria": [...], "failures": [ids]}
nlohmann::json acceptance_json(const std::vector<CriterionResult>& results, Profile profile);

std::string_view to_string(Profile p) noexcept;

} // namespace anderson
