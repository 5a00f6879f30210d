#pragma once
#include <string>
#include <vector>

namespace cascade {

// Microscopic gain-medium rates; only the combination 2 g^2 r_a / gamma^2 enters
// the reduced two-mode dynamics.
struct MicroscopicParams {
    double g;      // atom-cavity coupling
    double r_a;    // atomic injection rate
    double gamma;  // atomic spontaneous decay
};

double linear_gain(const MicroscopicParams& m);

// All rates share one arbitrary unit; the CLI defaults document the kappa = 1
// reading but any positive kappa works.
struct SystemParams {
    double kappa;    // cavity damping, identical for both modes
    double gain_A;   // linear gain coefficient
    double eta;      // lower-minus-upper level population difference, in [0, 1]
    double epsilon;  // coherent drive amplitude, identical for both modes
};

// Throws std::invalid_argument on domain violations.  eta = 0 is accepted (limit
// evaluation) but flagged by check_stability; eta < 0 is rejected outright.
void check_params(const SystemParams& p);

// Initial atomic density-matrix elements for the pure superposition preparation.
// eta is the canonical input; the elements are always derived, never set directly.
struct AtomicPrep {
    double rho_aa;  // upper-level population (1 - eta)/2
    double rho_cc;  // lower-level population (1 + eta)/2
    double rho_ac;  // real coherence sqrt(1 - eta^2)/2 = sqrt(rho_aa rho_cc)
};

AtomicPrep derive_atomic_prep(double eta);

struct DecayRates {
    double mu_a;  // kappa - A (1 - eta)/2; may be negative (net gain on mode a)
    double mu_b;  // kappa + A (1 + eta)/2
    double mu;    // kappa + A eta/2 = (mu_a + mu_b)/2
};

DecayRates decay_rates(const SystemParams& p);

struct StabilityReport {
    bool stable;
    double max_real_eigenvalue;                 // over all moment-drift blocks
    std::vector<double> eigenvalue_real_parts;  // sorted descending; 2 + 3 + 3 entries
    std::string notes;
};

// Eigenvalues of the assembled moment-drift blocks: the 2x2 first-moment block
// in (<a>, <b^dag>) and the two identical 3x3 second-moment blocks.  Stability
// is decided by the full blocks, not by sign(mu_a): mu_a < 0 is common in the
// interesting regime while the coupled system stays stable.
StabilityReport check_stability(const SystemParams& p);

}  // namespace cascade
