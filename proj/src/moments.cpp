#include "cascade/moments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cascade/csv.hpp"

namespace cascade {

namespace {

double coupling_alpha(const SystemParams& p) {
    return p.gain_A * derive_atomic_prep(p.eta).rho_ac;  // A sqrt(1-eta^2)/2
}

}  // namespace

MomentState drift(const MomentState& s, const SystemParams& p) {
    const DecayRates r = decay_rates(p);
    const AtomicPrep prep = derive_atomic_prep(p.eta);
    const double alpha = p.gain_A * prep.rho_ac;
    const double eps = p.epsilon;

    MomentState d;
    d.m_a = -0.5 * r.mu_a * s.m_a - 0.5 * alpha * std::conj(s.m_b) + eps;
    d.m_b = -0.5 * r.mu_b * s.m_b + 0.5 * alpha * std::conj(s.m_a) + eps;
    d.s_aa = -r.mu_a * s.s_aa - alpha * s.x_abdag + 2.0 * eps * s.m_a;
    d.s_bb = -r.mu_b * s.s_bb + alpha * std::conj(s.x_abdag) + 2.0 * eps * s.m_b;
    d.n_a = -r.mu_a * s.n_a - 0.5 * alpha * (s.x_ab + std::conj(s.x_ab)) +
            eps * (s.m_a + std::conj(s.m_a)) + p.gain_A * prep.rho_aa;
    d.n_b = -r.mu_b * s.n_b + 0.5 * alpha * (s.x_ab + std::conj(s.x_ab)) +
            eps * (s.m_b + std::conj(s.m_b));
    d.x_abdag = -r.mu * s.x_abdag + 0.5 * alpha * (s.s_aa - std::conj(s.s_bb)) +
                eps * (s.m_a + std::conj(s.m_b));
    d.x_ab = -r.mu * s.x_ab + 0.5 * alpha * (s.n_a - s.n_b) + 0.5 * alpha +
             eps * (s.m_a + s.m_b);
    return d;
}

double residual(const MomentState& s, const SystemParams& p) {
    const MomentState d = drift(s, p);
    return std::max({std::abs(d.m_a), std::abs(d.m_b), std::abs(d.s_aa),
                     std::abs(d.s_bb), std::abs(d.n_a), std::abs(d.n_b),
                     std::abs(d.x_abdag), std::abs(d.x_ab)});
}

SteadyStateMoments steady_state_closed_form(const SystemParams& p) {
    check_params(p);
    if (p.eta <= 0.0)
        throw std::domain_error("closed-form steady state requires eta > 0");
    const double kappa = p.kappa, A = p.gain_A, eta = p.eta, eps = p.epsilon;
    const double sq = std::sqrt(1.0 - eta * eta);
    const double d1 = kappa * kappa + kappa * A * eta;
    const double m2 = 2.0 * kappa + A * eta;
    if (d1 == 0.0 || m2 == 0.0)
        throw std::domain_error("singular steady-state denominator");
    const double mu = m2 / 2.0;
    const double mu_b = kappa + A * (1.0 + eta) / 2.0;
    const double alpha = A * sq / 2.0;
    const double rho_aa = (1.0 - eta) / 2.0;

    // first moments, linear in eps (computed as eps * base so the linearity is
    // exact in floating point as well)
    const double m_a = eps * ((2.0 * kappa + A * (1.0 + eta) - A * sq) / d1);
    const double m_b = eps * ((2.0 * kappa - A * (1.0 - eta) + A * sq) / d1);

    // drive-independent parts of the photon-sector moments
    const double y0 = alpha * kappa * mu_b / (2.0 * mu * d1);
    const double nb0 = alpha * alpha * kappa / (2.0 * mu * d1);
    const double na0 =
        (A * rho_aa * (mu_b * mu + alpha * alpha / 2.0) - alpha * alpha * mu_b / 2.0) /
        (mu * d1);

    MomentState st;
    st.m_a = m_a;
    st.m_b = m_b;
    st.s_aa = m_a * m_a;
    st.s_bb = m_b * m_b;
    st.x_abdag = m_a * m_b;
    st.n_a = na0 + m_a * m_a;
    st.n_b = nb0 + m_b * m_b;
    st.x_ab = y0 + m_a * m_b;
    return {st, SteadySource::closed_form, residual(st, p)};
}

SteadyStateMoments steady_state_linear_solve(const SystemParams& p) {
    check_params(p);
    const StabilityReport stab = check_stability(p);
    if (!stab.stable) {
        std::ostringstream msg;
        msg << "drift is unstable (max Re eigenvalue " << stab.max_real_eigenvalue
            << ") at kappa=" << p.kappa << " A=" << p.gain_A << " eta=" << p.eta;
        throw std::runtime_error(msg.str());
    }
    const DecayRates r = decay_rates(p);
    const double alpha = coupling_alpha(p);
    const double rho_aa = derive_atomic_prep(p.eta).rho_aa;
    const double eps = p.epsilon;

    // The blocks are tiny but badly cancelling: the photon-sector solutions
    // grow like eps^2 while the downstream variances need them to ~1e-12
    // absolute, and rounding in the substituted first moments is amplified by
    // eps.  Carrying the solve in extended precision buys that back without
    // changing the route.
    using ld = long double;
    using Mat2 = Eigen::Matrix<ld, 2, 2>;
    using Vec2 = Eigen::Matrix<ld, 2, 1>;
    using Mat3 = Eigen::Matrix<ld, 3, 3>;
    using Vec3 = Eigen::Matrix<ld, 3, 1>;

    // first moments: mu_a <a> + alpha <b^dag> = 2 eps; -alpha <a> + mu_b <b^dag> = 2 eps
    Mat2 b2;
    b2 << r.mu_a, alpha, -alpha, r.mu_b;
    if (std::abs(static_cast<double>(b2.determinant())) < 1e-300)
        throw std::runtime_error("singular first-moment block");
    const Vec2 first = b2.partialPivLu().solve(Vec2(2.0L * eps, 2.0L * eps));
    const ld m_a = first(0), m_b = first(1);  // all real for real drive

    // both second-moment blocks share one matrix; factor once, two right-hand sides.
    // The (3,3) entry must satisfy 2*mu == mu_a + mu_b exactly in the working
    // precision, otherwise the eps-quadratic parts of the solutions stop being
    // exact products of the first moments and the defect (a few ulp of mu_b,
    // amplified by the block's small leading singular value) leaks into the
    // downstream variances.  Summing the two double rates in long double is exact.
    Mat3 b3;
    b3 << r.mu_a, 0.0L, alpha,
          0.0L, r.mu_b, -alpha,
          -alpha / 2.0L, alpha / 2.0L,
          (static_cast<ld>(r.mu_a) + static_cast<ld>(r.mu_b)) / 2.0L;
    if (std::abs(static_cast<double>(b3.determinant())) < 1e-300)
        throw std::runtime_error("singular second-moment block");
    const Eigen::PartialPivLU<Mat3> lu(b3);
    // (<a^2>, <b^dag^2>, <a b^dag>)
    const Vec3 quad = lu.solve(Vec3(2.0L * eps * m_a, 2.0L * eps * m_b, eps * (m_a + m_b)));
    // (<a^dag a>, <b^dag b>, <a b>)
    const Vec3 phot = lu.solve(Vec3(
        2.0L * eps * m_a + static_cast<ld>(p.gain_A) * rho_aa, 2.0L * eps * m_b,
        eps * (m_a + m_b) + alpha / 2.0L));

    MomentState st;
    st.m_a = static_cast<double>(m_a);
    st.m_b = static_cast<double>(m_b);
    st.s_aa = static_cast<double>(quad(0));
    st.s_bb = static_cast<double>(quad(1));  // real, so <b^2> = <b^dag^2>
    st.x_abdag = static_cast<double>(quad(2));
    st.n_a = static_cast<double>(phot(0));
    st.n_b = static_cast<double>(phot(1));
    st.x_ab = static_cast<double>(phot(2));
    return {st, SteadySource::linear_solve, residual(st, p)};
}

namespace {

using state_t = std::array<cplx, 8>;

state_t to_array(const MomentState& s) {
    return {s.m_a, s.m_b, s.s_aa, s.s_bb, s.n_a, s.n_b, s.x_abdag, s.x_ab};
}

MomentState from_array(const state_t& y) {
    MomentState s;
    s.m_a = y[0];
    s.m_b = y[1];
    s.s_aa = y[2];
    s.s_bb = y[3];
    s.n_a = y[4];
    s.n_b = y[5];
    s.x_abdag = y[6];
    s.x_ab = y[7];
    return s;
}

}  // namespace

Trajectory evolve(const MomentState& s0, const SystemParams& p, double t_final, double tol) {
    check_params(p);
    if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");

    auto system = [&p](const state_t& y, state_t& dydt, double) {
        dydt = to_array(drift(from_array(y), p));
    };

    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<state_t>());

    Trajectory tr;
    tr.stats.tol = tol;
    tr.t.push_back(0.0);
    tr.states.push_back(s0);

    state_t y = to_array(s0);
    const DecayRates r = decay_rates(p);
    const double fastest = std::max({1.0, std::abs(r.mu_a), r.mu_b, r.mu});
    double t = 0.0;
    double dt = std::min(t_final, 0.1 / fastest);
    const double dt_min = t_final * 1e-14;

    for (;;) {
        const double remaining = t_final - t;
        if (remaining <= 0.0) break;
        const bool final_step = dt >= remaining;
        double trial = final_step ? remaining : dt;
        const auto outcome = stepper.try_step(system, y, t, trial);
        if (outcome == ode::success) {
            ++tr.stats.steps;
            if (final_step) t = t_final;  // land exactly, undoing roundoff in t += dt
            tr.t.push_back(t);
            tr.states.push_back(from_array(y));
            if (final_step) break;
            dt = trial;  // accepted: trial now holds the proposed next step
        } else {
            ++tr.stats.rejected;
            dt = trial;  // rejected: trial now holds the reduced step
            if (dt < dt_min) {
                std::ostringstream msg;
                msg << "step size underflow at t = " << t << " (dt = " << dt << ")";
                throw std::runtime_error(msg.str());
            }
        }
    }
    return tr;
}

std::string trajectory_csv(const Trajectory& tr) {
    std::string out =
        "t,Re_m_a,Im_m_a,Re_m_b,Im_m_b,Re_s_aa,Im_s_aa,Re_s_bb,Im_s_bb,"
        "Re_n_a,Im_n_a,Re_n_b,Im_n_b,Re_x_abdag,Im_x_abdag,Re_x_ab,Im_x_ab\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const MomentState& s = tr.states[i];
        out += fmt_double(tr.t[i]);
        for (const cplx& z : {s.m_a, s.m_b, s.s_aa, s.s_bb, s.n_a, s.n_b, s.x_abdag, s.x_ab}) {
            out += ',';
            out += fmt_double(z.real());
            out += ',';
            out += fmt_double(z.imag());
        }
        out += '\n';
    }
    return out;
}

}  // namespace cascade
