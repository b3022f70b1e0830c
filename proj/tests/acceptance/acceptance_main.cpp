// Acceptance suite: runs every criterion and prints one pass/fail line each.
// Exit code is the number of failed criteria.
//
//   iontrap_acceptance [--only N[,M...]]

#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <map>
#include <set>
#include <string>

namespace acceptance {

namespace {
struct Entry {
    std::string title;
    CriterionFn fn;
};
std::map<int, Entry>& registry() {
    static std::map<int, Entry> r;
    return r;
}
}  // namespace

void register_criterion(int number, const std::string& title, CriterionFn fn) {
    registry()[number] = {title, std::move(fn)};
}

}  // namespace acceptance

int main(int argc, char** argv) {
    using namespace acceptance;
    register_closed_form();
    register_md();
    register_analysis();
    register_kinetics();

    std::set<int> only;
    for (int a = 1; a < argc; ++a) {
        if (std::strcmp(argv[a], "--only") == 0 && a + 1 < argc) {
            const char* p = argv[a + 1];
            while (*p) {
                only.insert(std::atoi(p));
                while (*p && *p != ',') ++p;
                if (*p == ',') ++p;
            }
        }
    }

    int failures = 0, ran = 0;
    for (auto& [number, entry] : registry()) {
        if (!only.empty() && !only.count(number)) continue;
        Criterion criterion(number, entry.title);
        const auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            entry.fn(criterion);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
        const bool pass = error.empty() && criterion.passed();
        std::printf("[%2d] %s  %s (%.1f s)\n", number, pass ? "PASS" : "FAIL",
                    entry.title.c_str(), dt);
        for (const auto& c : criterion.checks())
            std::printf("       %s %s: %s\n", c.pass ? "ok  " : "FAIL", c.label.c_str(),
                        c.detail.c_str());
        if (!error.empty()) std::printf("       error: %s\n", error.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
        ++ran;
    }
    std::printf("ACCEPTANCE: %d/%d criteria passed\n", ran - failures, ran);
    return failures;
}
