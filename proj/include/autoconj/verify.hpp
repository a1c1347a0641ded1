#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "autoconj/config.hpp"

namespace autoconj {

struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    double value = 0.0;  // the measured quantity compared against the tolerance
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool pass() const;
    nlohmann::ordered_json to_json() const;
};

/// Runs the invariant suite of every module on the configured problem.
/// Bifunction checks use the primal box for both X and X*; they are skipped
/// when that grid would exceed `max_bifunction_nodes`.
VerifyReport run_verify(const Config& config, std::size_t max_bifunction_nodes = 2'000'000);

} // namespace autoconj
