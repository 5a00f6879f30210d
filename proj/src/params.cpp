#include "cascade/params.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cascade {

double linear_gain(const MicroscopicParams& m) {
    if (!(m.g > 0.0) || !(m.r_a > 0.0) || !(m.gamma > 0.0))
        throw std::invalid_argument("linear_gain: g, r_a, gamma must all be > 0");
    return 2.0 * m.g * m.g * m.r_a / (m.gamma * m.gamma);
}

void check_params(const SystemParams& p) {
    if (!(p.kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
    if (!(p.gain_A >= 0.0)) throw std::invalid_argument("gain_A must be >= 0");
    if (!(p.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    if (std::isnan(p.eta) || p.eta < 0.0 || p.eta > 1.0)
        throw std::invalid_argument("eta must lie in [0, 1]");
}

AtomicPrep derive_atomic_prep(double eta) {
    if (std::isnan(eta) || eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("eta must lie in [0, 1]");
    AtomicPrep prep;
    prep.rho_aa = (1.0 - eta) / 2.0;
    prep.rho_cc = (1.0 + eta) / 2.0;
    prep.rho_ac = std::sqrt(1.0 - eta * eta) / 2.0;
    return prep;
}

DecayRates decay_rates(const SystemParams& p) {
    check_params(p);
    DecayRates r;
    r.mu_a = p.kappa - p.gain_A * (1.0 - p.eta) / 2.0;
    r.mu_b = p.kappa + p.gain_A * (1.0 + p.eta) / 2.0;
    r.mu = p.kappa + p.gain_A * p.eta / 2.0;
    return r;
}

StabilityReport check_stability(const SystemParams& p) {
    check_params(p);
    const DecayRates r = decay_rates(p);
    const double alpha = p.gain_A * derive_atomic_prep(p.eta).rho_ac;  // A sqrt(1-eta^2)/2

    // First-moment drift block in (<a>, <b^dag>).
    Eigen::Matrix2d first;
    first << -r.mu_a / 2.0, -alpha / 2.0,
              alpha / 2.0, -r.mu_b / 2.0;
    // Both second-moment blocks -- (<a^2>, <b^dag^2>, <a b^dag>) and
    // (<a^dag a>, <b^dag b>, <a b>) -- share this drift matrix.
    Eigen::Matrix3d second;
    second << -r.mu_a, 0.0, -alpha,
              0.0, -r.mu_b, alpha,
              alpha / 2.0, -alpha / 2.0, -r.mu;

    StabilityReport rep;
    Eigen::EigenSolver<Eigen::Matrix2d> es2(first, false);
    for (int i = 0; i < 2; ++i) rep.eigenvalue_real_parts.push_back(es2.eigenvalues()(i).real());
    Eigen::EigenSolver<Eigen::Matrix3d> es3(second, false);
    for (int rep_count = 0; rep_count < 2; ++rep_count)
        for (int i = 0; i < 3; ++i) rep.eigenvalue_real_parts.push_back(es3.eigenvalues()(i).real());
    std::sort(rep.eigenvalue_real_parts.begin(), rep.eigenvalue_real_parts.end(),
              std::greater<double>());
    rep.max_real_eigenvalue = rep.eigenvalue_real_parts.front();
    rep.stable = rep.max_real_eigenvalue < 0.0;

    std::ostringstream notes;
    if (p.eta == 0.0)
        notes << "eta=0 boundary: steady-state formulas hold only for eta>0; "
                 "blocks evaluated at the limit. ";
    const double d1 = p.kappa * p.kappa + p.kappa * p.gain_A * p.eta;
    const double m2 = 2.0 * p.kappa + p.gain_A * p.eta;
    const double mode_a_net = 2.0 * p.kappa - p.gain_A * (1.0 - p.eta);
    const double rate_scale = std::max({1.0, p.kappa, p.gain_A});
    if (std::abs(d1) <= 1e-14 * rate_scale * rate_scale)
        notes << "kappa^2 + kappa*A*eta = 0: singular steady-state denominator. ";
    if (std::abs(m2) <= 1e-14 * rate_scale)
        notes << "2*kappa + A*eta = 0: singular steady-state denominator. ";
    if (std::abs(mode_a_net) <= 1e-14 * rate_scale)
        notes << "2*kappa - A*(1-eta) = 0: mode-a net linear gain balances loss "
                 "(mu_a = 0); coupled blocks remain stable. ";
    rep.notes = notes.str();
    return rep;
}

}  // namespace cascade
