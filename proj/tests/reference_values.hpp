#pragma once

// Steady-state reference values frozen from a 50-digit evaluation of the exact
// steady-state algebra (symbolic solve of drift = 0, evaluated with mpmath).
// All values are correctly rounded to double precision.

namespace ref {

// kappa=1, A=100, eta=0.1, epsilon=0
inline constexpr double strong_n_a = 22.840909090909090909;      // 1507.5/66
inline constexpr double strong_n_b = 18.75;                      // exact
inline constexpr double strong_x_ab = 21.105794120443453585;
inline constexpr double strong_mean_photon = 41.590909090909090909;  // 915/22
inline constexpr double strong_dc_minus = 0.37932085002218373854;
inline constexpr double strong_dc_plus = 84.802497331795998080;
inline constexpr double strong_duan = 0.75864170004436747708;

// kappa=1, A=100, eta=0.1, epsilon=1
inline constexpr double driven_m_a = 1.1364778444852731388;
inline constexpr double driven_m_b = 1.0453403373329086794;
inline constexpr double driven_s_aa = 1.2915818910058926773;
inline constexpr double driven_s_bb = 1.0927364208552793113;
inline constexpr double driven_x_abdag = 1.1880061333256123528;
inline constexpr double driven_n_a = 24.132490981914983586;
inline constexpr double driven_n_b = 19.842736420855279311;
inline constexpr double driven_x_ab = 22.293800253769065938;
inline constexpr double driven_mean_photon = 43.975227402770262898;

// kappa=1, A=0.4, eta=0.5, epsilon=0.05 (the low-excitation oracle point)
inline constexpr double oracle_m_a = 0.093899576603592689221;
inline constexpr double oracle_m_b = 0.089433756729740644113;
inline constexpr double oracle_s_aa = 0.0088171304863339715534;
inline constexpr double oracle_s_bb = 0.0079983968427944299502;
inline constexpr double oracle_x_abdag = 0.0083977918909913548038;
inline constexpr double oracle_n_a = 0.10351410018330366852;
inline constexpr double oracle_n_b = 0.019362033206430793587;
inline constexpr double oracle_x_ab = 0.093688172566731524561;
inline constexpr double oracle_mean_photon = 0.12287613338973446211;
inline constexpr double oracle_dc_minus = 0.93547984470912572109;

// kappa=1, A=100, eta=3/5, epsilon=2 (all moments exactly rational)
inline constexpr double rational_m_a = 164.0 / 61.0;
inline constexpr double rational_m_b = 84.0 / 61.0;
inline constexpr double rational_s_aa = 26896.0 / 3721.0;
inline constexpr double rational_s_bb = 7056.0 / 3721.0;
inline constexpr double rational_x_abdag = 13776.0 / 3721.0;
inline constexpr double rational_n_a = 920396.0 / 115351.0;
inline constexpr double rational_n_b = 267536.0 / 115351.0;
inline constexpr double rational_x_ab = 525876.0 / 115351.0;
inline constexpr double rational_mean_photon = 1187932.0 / 115351.0;
inline constexpr double rational_dc_minus = 871.0 / 1891.0;
inline constexpr double rational_dc_plus = 7351.0 / 1891.0;

}  // namespace ref
