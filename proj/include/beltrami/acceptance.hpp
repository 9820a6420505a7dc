#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beltrami/runner.hpp"

namespace beltrami {

inline constexpr int kCriterionCount = 9;

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Assertion> assertions;
    bool pass() const;
};

// Runs one release criterion. Criterion 9 re-launches the CLI binary and
// needs its path; the others ignore cli_path. The seed feeds every random
// draw inside the criterion, so equal seeds give identical reports.
CriterionResult run_criterion(int id, std::uint64_t seed,
                              const std::string& cli_path = "");

}  // namespace beltrami
