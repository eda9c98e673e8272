#pragma once

#include <string>
#include <vector>

namespace hofa::acceptance {

struct CriterionResult {
    int id;
    std::string name;
    bool pass;
    double seconds;
    std::string detail;
};

// Runs the numbered acceptance criteria (all of them when `only` is empty)
// and returns one result per criterion.
std::vector<CriterionResult> run(const std::vector<int>& only = {});

}  // namespace hofa::acceptance
