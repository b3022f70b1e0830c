#pragma once

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace acceptance {

struct Check {
    std::string label;
    bool pass = false;
    std::string detail;
};

class Criterion {
public:
    Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

    void check(const std::string& label, bool pass, const std::string& detail = "") {
        checks_.push_back({label, pass, detail});
    }
    // value within a relative band around target
    void check_rel(const std::string& label, double value, double target, double tol) {
        const double rel = target != 0 ? std::abs(value - target) / std::abs(target) : value;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6g vs %.6g (|rel| = %.21f%%, tol %.3g%%)", value,
                      target, 100 * rel, 100 * tol);
        checks_.push_back({label, rel <= tol, buf});
    }
    void check_range(const std::string& label, double value, double lo, double hi) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6g in [%.6g, %.6g]", value, lo, hi);
        checks_.push_back({label, value >= lo && value <= hi, buf});
    }

    bool passed() const {
        for (const auto& c : checks_)
            if (!c.pass) return false;
        return !checks_.empty();
    }
    int number() const { return number_; }
    const std::string& title() const { return title_; }
    const std::vector<Check>& checks() const { return checks_; }

private:
    int number_;
    std::string title_;
    std::vector<Check> checks_;
};

// registered by the criteria translation units
using CriterionFn = std::function<void(Criterion&)>;
void register_criterion(int number, const std::string& title, CriterionFn fn);

struct Registrar {
    Registrar(int number, const std::string& title, CriterionFn fn) {
        register_criterion(number, title, std::move(fn));
    }
};

void register_closed_form();
void register_md();
void register_analysis();
void register_kinetics();

}  // namespace acceptance
