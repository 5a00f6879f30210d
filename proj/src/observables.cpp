#include "cascade/observables.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cascade/csv.hpp"

namespace cascade {

namespace {

void guard_real(const char* what, cplx value) {
    if (std::abs(value.imag()) > 1e-8 * std::max(1.0, std::abs(value.real()))) {
        std::ostringstream msg;
        msg << what << " has imaginary part " << value.imag() << " (unphysical input)";
        throw std::domain_error(msg.str());
    }
}

}  // namespace

QuadratureVariances variances_from_moments(const MomentState& s) {
    guard_real("<a^dag a>", s.n_a);
    guard_real("<b^dag b>", s.n_b);

    // single-mode and cross cumulants
    const double nu_a = s.n_a.real() - std::norm(s.m_a);
    const double nu_b = s.n_b.real() - std::norm(s.m_b);
    const cplx nu_ab = s.x_abdag - s.m_a * std::conj(s.m_b);  // <a b^dag> - <a><b^dag>
    const cplx sg_a = s.s_aa - s.m_a * s.m_a;
    const cplx sg_b = s.s_bb - s.m_b * s.m_b;
    const cplx sg_ab = s.x_ab - s.m_a * s.m_b;

    // sum mode c = (a+b)/sqrt2: <c^dag c> - |<c>|^2 and <c^2> - <c>^2;
    // difference mode d = (a-b)/sqrt2 flips the cross-term signs
    const double nu_c = 0.5 * (nu_a + nu_b) + nu_ab.real();
    const double nu_d = 0.5 * (nu_a + nu_b) - nu_ab.real();
    const cplx sg_c = 0.5 * (sg_a + sg_b) + sg_ab;
    const cplx sg_d = 0.5 * (sg_a + sg_b) - sg_ab;

    QuadratureVariances v;
    v.dc_plus = 1.0 + 2.0 * nu_c + 2.0 * sg_c.real();
    v.dc_minus = 1.0 + 2.0 * nu_c - 2.0 * sg_c.real();
    v.dd_plus = 1.0 + 2.0 * nu_d + 2.0 * sg_d.real();
    v.dd_minus = 1.0 + 2.0 * nu_d - 2.0 * sg_d.real();
    for (double var : {v.dc_plus, v.dc_minus, v.dd_plus, v.dd_minus})
        if (!(var > 0.0))
            throw std::domain_error("non-positive quadrature variance (unphysical input)");
    return v;
}

QuadratureVariances variances_closed_form(const SystemParams& p) {
    check_params(p);
    if (p.eta <= 0.0)
        throw std::domain_error("closed-form variances require eta > 0");
    const double kappa = p.kappa, A = p.gain_A, eta = p.eta;
    const double coherence_sq = A * A * (1.0 - eta * eta);
    const double f = 2.0 * kappa + A + A * eta;
    const double m2 = 2.0 * kappa + A * eta;
    const double root = A * std::sqrt(1.0 - eta * eta);
    const double den = 2.0 * m2 * (kappa + A * eta);
    if (den == 0.0) throw std::domain_error("singular variance denominator");

    QuadratureVariances v;
    v.dc_plus = (coherence_sq + f * (m2 + root)) / den;
    v.dc_minus = (coherence_sq + f * (m2 - root)) / den;
    v.dd_plus = v.dc_minus;  // exact: cross terms flip sign under b -> -b
    v.dd_minus = v.dc_plus;
    return v;
}

DuanWitness duan_sum(const MomentState& s, double z) {
    if (z == 0.0) throw std::invalid_argument("duan_sum: z must be nonzero");
    guard_real("<a^dag a>", s.n_a);
    guard_real("<b^dag b>", s.n_b);
    const double az = std::abs(z), bz = 1.0 / z;
    const double nu_a = s.n_a.real() - std::norm(s.m_a);
    const double nu_b = s.n_b.real() - std::norm(s.m_b);
    const double sg_ab = (s.x_ab - s.m_a * s.m_b).real();

    DuanWitness w;
    w.z = z;
    // Delta u^2 + Delta v^2: the single-mode squeezing terms cancel between u
    // and v, leaving occupations plus the <ab> correlation
    w.sum_uv = az * az * (1.0 + 2.0 * nu_a) + bz * bz * (1.0 + 2.0 * nu_b) +
               4.0 * az * bz * sg_ab;
    w.threshold = z * z + 1.0 / (z * z);
    w.bound = 2.0 * w.threshold;
    w.entangled = w.sum_uv < w.threshold;
    w.note = "separability threshold z^2+1/z^2 (2 at z=-1) drives the verdict; "
             "bound records the looser 2(z^2+1/z^2)";
    return w;
}

double mean_photon_closed_form(const SystemParams& p) {
    check_params(p);
    if (p.eta <= 0.0)
        throw std::domain_error("closed-form mean photon number requires eta > 0");
    const double kappa = p.kappa, A = p.gain_A, eta = p.eta, eps = p.epsilon;
    const double d1 = kappa * kappa + kappa * A * eta;
    const double m2 = 2.0 * kappa + A * eta;
    if (d1 == 0.0 || m2 == 0.0) throw std::domain_error("singular denominator");
    const double sq = std::sqrt(1.0 - eta * eta);
    const double gain_term = A * (1.0 - eta) * (2.0 * kappa + A + A * eta) / (4.0 * d1);
    const double coherence_term = A * A * A * eta * (1.0 - eta * eta) / (4.0 * d1 * m2);
    const double drive_term =
        4.0 * eps * eps * (A * A * (1.0 - sq) + 2.0 * d1) / (d1 * d1);
    const double n = gain_term - coherence_term + drive_term;
    if (n < -1e-12) throw std::domain_error("negative mean photon number");
    return n < 0.0 ? 0.0 : n;
}

double mean_photon_from_moments(const MomentState& s) {
    guard_real("<a^dag a>", s.n_a);
    guard_real("<b^dag b>", s.n_b);
    const double direct = (s.n_a + s.n_b).real();
    // same total through the sum/difference modes: <c^dag c> + <d^dag d>
    const double n_c = 0.5 * ((s.n_a + s.n_b).real() + 2.0 * s.x_abdag.real());
    const double n_d = 0.5 * ((s.n_a + s.n_b).real() - 2.0 * s.x_abdag.real());
    if (std::abs((n_c + n_d) - direct) > 1e-12 * std::max(1.0, std::abs(direct)))
        throw std::runtime_error("mode-basis photon-number identity violated");
    if (direct < -1e-9)
        throw std::domain_error("negative mean photon number (unphysical input)");
    return direct < 0.0 ? 0.0 : direct;
}

const char* to_string(ReportSource s) {
    switch (s) {
        case ReportSource::closed_form: return "closed_form";
        case ReportSource::from_moments: return "from_moments";
        case ReportSource::fock_oracle: return "fock_oracle";
    }
    return "unknown";
}

ObservablesReport observables_closed_form(const SystemParams& p, double z) {
    ObservablesReport r;
    r.params = p;
    r.variances = variances_closed_form(p);
    if (z == -1.0) {
        DuanWitness w;
        w.z = z;
        w.sum_uv = 2.0 * r.variances.dc_minus;  // steady-state identity
        w.threshold = 2.0;
        w.bound = 4.0;
        w.entangled = w.sum_uv < w.threshold;
        w.note = "sum_uv = 2 dc_minus at z=-1; threshold 2 drives the verdict";
        r.duan = w;
    } else {
        r.duan = duan_sum(steady_state_closed_form(p).state, z);
    }
    r.mean_photon = mean_photon_closed_form(p);
    r.source = ReportSource::closed_form;
    return r;
}

ObservablesReport observables_from_moments(const MomentState& s, const SystemParams& p,
                                           ReportSource source, double z) {
    ObservablesReport r;
    r.params = p;
    r.variances = variances_from_moments(s);
    r.duan = duan_sum(s, z);
    r.mean_photon = mean_photon_from_moments(s);
    r.source = source;
    return r;
}

std::string report_csv_header() {
    return "kappa,gain_A,eta,epsilon,dc_plus,dc_minus,dd_plus,dd_minus,"
           "duan_sum,duan_bound,entangled,mean_photon,source";
}

std::string report_csv_row(const ObservablesReport& r) {
    std::string row;
    for (double x : {r.params.kappa, r.params.gain_A, r.params.eta, r.params.epsilon,
                     r.variances.dc_plus, r.variances.dc_minus, r.variances.dd_plus,
                     r.variances.dd_minus, r.duan.sum_uv, r.duan.threshold}) {
        row += fmt_double(x);
        row += ',';
    }
    row += r.duan.entangled ? '1' : '0';
    row += ',';
    row += fmt_double(r.mean_photon);
    row += ',';
    row += to_string(r.source);
    return row;
}

}  // namespace cascade
