// Acceptance suite runner: one PASS/FAIL line per criterion.
// Arguments select criteria by number; no arguments runs all nine.

#include <cstdlib>
#include <iostream>
#include <vector>

#include "seelab/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    int failed = 0;
    auto results = seelab::run_acceptance(ids, [&](const seelab::CriterionResult& r) {
        std::cout << seelab::format_result(r) << std::endl;
        failed += r.passed ? 0 : 1;
    });
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
