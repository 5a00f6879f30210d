#pragma once
#include <string>

#include "cascade/moments.hpp"
#include "cascade/params.hpp"

namespace cascade {

// Variances of the sum-mode (c = (a+b)/sqrt(2)) and difference-mode
// (d = (a-b)/sqrt(2)) quadratures c_+ = c + c^dag, c_- = i(c^dag - c), and the
// same for d.  Vacuum level is 1; below 1 means squeezing.
struct QuadratureVariances {
    double dc_plus;
    double dc_minus;
    double dd_plus;
    double dd_minus;
};

// From the moment state, using [a, a^dag] = [b, b^dag] = 1 and [a, b] =
// [a, b^dag] = 0.  Variance of c_+/-:  1 + 2(<c^dag c> - |<c>|^2)
// +/- 2 Re(<c^2> - <c>^2), with the mode sums/differences expanded below.
// Throws std::domain_error when the input carries an imaginary occupation or a
// non-positive variance (unphysical input).
QuadratureVariances variances_from_moments(const MomentState& s);

// Literal steady-state formula:
//   Dc_+/-^2 = [A^2(1-eta^2) + (2k+A+A eta)(2k+A eta +/- A sqrt(1-eta^2))]
//              / (2 (2k+A eta)(k+A eta))
// The difference-mode variances swap the +/- role (the sign of the cross terms
// flips under b -> -b), so dd_plus = dc_minus and dd_minus = dc_plus exactly.
// Requires eta > 0.
QuadratureVariances variances_closed_form(const SystemParams& p);

// Inseparability witness built from u = |z| x_a + (1/z) x_b and
// v = |z| p_a - (1/z) p_b, with x = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2).
// Separable states obey sum_uv >= z^2 + 1/z^2 (threshold; equals 2 at z = -1).
// `bound` additionally records the looser literal combination 2(z^2 + 1/z^2);
// the entangled verdict uses the threshold with strict inequality.
struct DuanWitness {
    double z;
    double sum_uv;     // Delta u^2 + Delta v^2
    double bound;      // 2 (z^2 + 1/z^2)
    double threshold;  // z^2 + 1/z^2 -- drives the verdict and the CSV column
    bool entangled;
    std::string note;
};

// At z = -1 and steady state the sum equals 2 dc_minus = 2 dd_plus.
DuanWitness duan_sum(const MomentState& s, double z = -1.0);

// Literal steady-state formula: total mean photon number
//   A(1-eta)(2k+A+A eta)/(4 D1) - A^3 eta (1-eta^2)/(4 D1 (2k+A eta))
//   + 4 eps^2 (A^2 (1 - sqrt(1-eta^2)) + 2 D1)/D1^2,   D1 = k^2 + k A eta.
// Requires eta > 0.
double mean_photon_closed_form(const SystemParams& p);

// Re(n_a + n_b); also evaluates <c^dag c> + <d^dag d> and checks the identity
// against the direct sum to 1e-12 (throws std::runtime_error on violation).
double mean_photon_from_moments(const MomentState& s);

enum class ReportSource { closed_form, from_moments, fock_oracle };

const char* to_string(ReportSource s);

struct ObservablesReport {
    SystemParams params;
    QuadratureVariances variances;
    DuanWitness duan;
    double mean_photon;
    ReportSource source;
};

// Closed-form report (variances + witness + mean photon from the literal
// steady-state formulas; z = -1 uses sum_uv = 2 dc_minus, other z fall back to
// the moment formula on the closed-form state).
ObservablesReport observables_closed_form(const SystemParams& p, double z = -1.0);

// Report computed from an explicit moment state (steady or not).
ObservablesReport observables_from_moments(const MomentState& s, const SystemParams& p,
                                           ReportSource source = ReportSource::from_moments,
                                           double z = -1.0);

// Flat CSV row schema shared by all front ends.  duan_bound carries the
// verdict threshold so every row satisfies: entangled == (duan_sum < duan_bound).
std::string report_csv_header();
std::string report_csv_row(const ObservablesReport& r);

}  // namespace cascade
