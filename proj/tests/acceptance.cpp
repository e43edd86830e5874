// Acceptance suite: one process per criterion so ctest reports them separately.

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "torusdyn/verify.hpp"

int main(int argc, char** argv) {
    std::vector<int> which = torusdyn::all_criteria();
    if (argc > 1) {
        int c = std::atoi(argv[1]);
        if (c < 1 || c > 11) {
            std::fprintf(stderr, "usage: acceptance [1..11]\n");
            return 2;
        }
        which = {c};
    }
    bool ok = true;
    for (int c : which) {
        torusdyn::CriterionReport report = torusdyn::run_criterion(c);
        std::cout << torusdyn::format_report(report);
        if (!report.passed()) ok = false;
    }
    return ok ? 0 : 1;
}
