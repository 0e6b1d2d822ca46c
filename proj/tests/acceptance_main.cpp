// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. `--criterion N` runs a single criterion (used by ctest so each
// shows up as its own test); default runs all twelve.

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "logtree/acceptance.hpp"

int main(int argc, char** argv) {
    using namespace logtree;
    std::vector<int> ids;
    mc::GateConfig cfg;
    if (const char* s = std::getenv("LOGTREE_THREADS")) cfg.threads = std::atoi(s);
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            ids.push_back(std::atoi(argv[++i]));
        else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
            cfg.seed = std::strtoull(argv[++i], nullptr, 10);
        else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
            cfg.threads = std::atoi(argv[++i]);
    }
    if (ids.empty())
        for (int i = 1; i <= 12; ++i) ids.push_back(i);

    bool all = true;
    for (int id : ids) {
        const auto t0 = std::chrono::steady_clock::now();
        acceptance::Criterion c;
        try {
            c = acceptance::run_criterion(id, cfg);
        } catch (const std::exception& e) {
            c.id = id;
            c.name = "criterion threw";
            c.pass = false;
            c.detail = e.what();
        }
        const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << "C" << c.id << " " << c.name << " ("
                  << dt << " ms)\n        " << c.detail << "\n";
        all = all && c.pass;
    }
    return all ? 0 : 1;
}
