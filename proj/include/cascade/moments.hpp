#pragma once
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cascade/params.hpp"

namespace cascade {

using cplx = std::complex<double>;

// The eight moments the dynamics closes on.  Conjugate moments (<a^dag>,
// <a^dag^2>, <a^dag b>, <a^dag b^dag>) are derived by conjugation, never stored.
struct MomentState {
    cplx m_a{};      // <a>
    cplx m_b{};      // <b>
    cplx s_aa{};     // <a^2>
    cplx s_bb{};     // <b^2>
    cplx n_a{};      // <a^dag a>
    cplx n_b{};      // <b^dag b>
    cplx x_abdag{};  // <a b^dag>
    cplx x_ab{};     // <a b>
};

// Time derivative of every stored moment.
MomentState drift(const MomentState& s, const SystemParams& p);

// Max-norm of the drift: how far s is from a fixed point.
double residual(const MomentState& s, const SystemParams& p);

enum class SteadySource { closed_form, linear_solve };

struct SteadyStateMoments {
    MomentState state;
    SteadySource source;
    double residual_norm;  // drift max-norm evaluated at the state
};

// Algebraic steady state.  Valid only for eta > 0 (throws std::domain_error at
// eta <= 0); the second moments are evaluated in the factored form
// <a^2> = <a>^2, <n_a> = n_a0 + <a>^2, ... which is finite everywhere the
// system is stable (the expanded per-moment fractions contain removable
// 2*kappa - A*(1-eta) cancellations).
SteadyStateMoments steady_state_closed_form(const SystemParams& p);

// Independent route: solve drift = 0 directly, block by block -- the 2x2 first
// moment block in (<a>, <b^dag>), then the two 3x3 second-moment blocks with
// the first-moment solution substituted as inhomogeneity.  Works for eta = 0
// too.  Throws std::runtime_error on singular blocks or unstable drift.
SteadyStateMoments steady_state_linear_solve(const SystemParams& p);

struct IntegratorStats {
    std::size_t steps = 0;     // accepted
    std::size_t rejected = 0;  // error-control rejections
    double tol = 0.0;
};

struct Trajectory {
    std::vector<double> t;             // strictly increasing, last entry = t_final
    std::vector<MomentState> states;   // one per time, states[0] = initial
    IntegratorStats stats;
};

// Adaptive embedded Runge-Kutta (dopri5) with mixed abs/rel error control at
// tol.  Samples every accepted step; final sample lands exactly on t_final.
// Throws std::runtime_error on step-size underflow (reports the time reached).
Trajectory evolve(const MomentState& s0, const SystemParams& p, double t_final,
                  double tol = 1e-10);

// Header t,Re_m_a,Im_m_a,... covering all eight moments, one row per sample.
std::string trajectory_csv(const Trajectory& tr);

}  // namespace cascade
