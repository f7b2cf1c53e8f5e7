#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace awd3 {

struct VerifyOptions {
    std::string filter;       // substring; empty runs everything
    std::string inject_fault; // test hook, e.g. "gradient"
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the property suite (gradient checks, label identities, beta
/// filtering, oracle agreement, ...) and prints one pass/fail line per check.
/// Returns the results; everything passed iff all `passed` flags are set.
std::vector<CheckResult> run_verification(const VerifyOptions& options,
                                          std::ostream& out);

} // namespace awd3
