#pragma once
#include <string>
#include <vector>

#include "cascade/fock.hpp"
#include "cascade/params.hpp"

namespace cascade {

// Strict JSON -> SystemParams.  Required: "kappa", "eta", and either "gain_A"
// or the microscopic trio "g"/"r_a"/"gamma" (never both); "epsilon" defaults
// to 0.  Unknown keys are rejected so config typos fail loudly instead of
// silently running the defaults.  Throws std::invalid_argument.
SystemParams params_from_json(const std::string& text);

enum class SweepOutputs { variances, duan, mean_photon, all };

struct SweepSpec {
    std::string parameter;  // "kappa" | "gain_A" | "eta" | "epsilon"
    double start = 0.0;
    double stop = 0.0;
    int count = 0;          // >= 1; a single-point "sweep" is a valid spot check
    bool log_scale = false;
    SystemParams fixed;     // swept component overwritten point by point
    SweepOutputs outputs = SweepOutputs::all;
    bool oracle_enabled = false;
    TruncationSpec trunc;
};

// Validates structure and ranges; throws std::invalid_argument with the
// offending key.  Schema:
//   {"sweep":   {"parameter": "eta", "start": 1e-3, "stop": 1, "count": 500,
//                "scale": "log"},                      // scale optional, "linear" default
//    "fixed":   {"kappa": 1, "gain_A": 100, "epsilon": 0},  // swept entry may be omitted
//    "outputs": "all",                                 // optional
//    "oracle":  {"enabled": true, "n_max": 12}}        // optional, off by default
SweepSpec sweep_from_json(const std::string& text);

void check_sweep(const SweepSpec& spec);

// Grid with exact endpoints (log scale is geometric, start > 0 required).
std::vector<double> sweep_grid(const SweepSpec& spec);

}  // namespace cascade
