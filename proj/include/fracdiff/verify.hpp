#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracdiff::verify {

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;  // measured numbers, or the exception message
};

/// Runs the invariant/property checks of one module.
/// suite: specfun | fracquad | volterra | ibvp | stefan | all
/// (Laplace-inversion properties run under specfun.)
std::vector<CheckResult> run_suite(const std::string& suite);

/// TAP-style report ("ok 3 - ..."); returns the number of failures.
int print_tap(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace fracdiff::verify
