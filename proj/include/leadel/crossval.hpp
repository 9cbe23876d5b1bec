#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leadel {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the full cross-validation suite (9 criteria, fixed seeds), printing one
// pass/fail line per criterion to `out` as each finishes.
std::vector<CriterionResult> run_acceptance_suite(std::ostream& out);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace leadel
