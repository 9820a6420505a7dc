// Release gate: run the numbered criteria and print one verdict line each.
// With no arguments all nine run; otherwise each argument selects one.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "beltrami/acceptance.hpp"

#ifndef BELTRAMI_CLI_PATH
#define BELTRAMI_CLI_PATH ""
#endif

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > beltrami::kCriterionCount) {
            std::fprintf(stderr, "unknown criterion: %s\n", argv[i]);
            return 2;
        }
        ids.push_back(id);
    }
    if (ids.empty())
        for (int id = 1; id <= beltrami::kCriterionCount; ++id)
            ids.push_back(id);

    bool all_pass = true;
    for (int id : ids) {
        beltrami::CriterionResult res;
        try {
            res = beltrami::run_criterion(id, 42, BELTRAMI_CLI_PATH);
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion %d: threw: %s\n", id, e.what());
            all_pass = false;
            continue;
        }
        const bool pass = res.pass();
        std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
                    res.title.c_str());
        if (!pass) {
            for (const auto& a : res.assertions) {
                if (a.pass) continue;
                std::printf("       %s: measured %.12g against bound %.12g\n",
                            a.name.c_str(), a.measured, a.bound);
            }
            all_pass = false;
        }
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
