#pragma once
#include <string>
#include <vector>

namespace cascade {

struct CheckResult {
    std::string name;
    bool passed = false;
    double elapsed_s = 0.0;
    std::string detail;  // measured extremum and location, or the failure account
};

// Cross-validation suite.  fast covers the analytic route-agreement, symmetry,
// limit, figure-shape and determinism checks (seconds); full adds the
// truncated-Fock-space oracle equivalence runs (minutes).  Each result carries
// its own runtime; checks with a stated budget fail when they exceed it.
std::vector<CheckResult> acceptance_checks(bool full);

bool all_passed(const std::vector<CheckResult>& results);

// "[PASS] name (0.03 s): detail" -- one stable line per check
std::string format_check_line(const CheckResult& r);

}  // namespace cascade
