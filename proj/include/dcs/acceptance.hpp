#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcs {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
};

constexpr int kCriterionCount = 13;

CriterionResult run_criterion(int id, std::uint64_t seed = 1);

// Criterion ids for a suite name: all, bounds, uniformity, tightness. Throws std::invalid_argument.
std::vector<int> suite_criteria(const std::string& suite);

}  // namespace dcs
