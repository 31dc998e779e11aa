#pragma once

// The acceptance suite: nine criteria, each reported as one pass/fail line.
// Thresholds and budgets are fixed here; criteria never adapt them.

#include <functional>
#include <string>
#include <vector>

namespace seelab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

/// Runs criterion `id` in 1..9; exceptions become failed results.
CriterionResult run_criterion(int id);

/// Runs the listed criteria (all when empty), reporting each as it completes.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [k] name: detail (t s / budget s)".
std::string format_result(const CriterionResult& r);

/// Extended-precision series reference for E_r(x), used by criterion 9.
double calE_reference(double r, double x);

}  // namespace seelab
