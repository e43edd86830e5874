#ifndef TORUSDYN_VERIFY_HPP
#define TORUSDYN_VERIFY_HPP

#include <string>
#include <vector>

namespace torusdyn {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool passed = false;
    std::string measured;
};

struct CriterionReport {
    int criterion = 0;
    std::vector<CheckResult> checks;
    double seconds = 0.0;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Runs one acceptance criterion (1..11). Throws on unknown index.
CriterionReport run_criterion(int criterion);

std::vector<int> all_criteria();

/// Maps a verify-suite name (rotation, denjoy, blowup, qmaps, da-derivative,
/// graph-transform, da-pipeline, classifier, example3, example4, determinism,
/// all) to criterion indices.
std::vector<int> criteria_for_suite(const std::string& suite);

std::string format_report(const CriterionReport& report);

}  // namespace torusdyn

#endif
