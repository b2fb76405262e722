#pragma once

#include <functional>
#include <string>
#include <vector>

namespace windlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Criterion ids in a suite: "exact", "mc", "sde" or "all".
std::vector<int> acceptance_suite(const std::string& suite);

CriterionResult run_criterion(int id);

// Runs the suite in id order, calling `report` after each criterion.
std::vector<CriterionResult> run_acceptance(const std::string& suite,
                                            const std::function<void(const CriterionResult&)>& report = {});

std::string format_result_line(const CriterionResult& r);

} // namespace windlab
