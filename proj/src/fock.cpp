#include "cascade/fock.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "cascade/csv.hpp"

namespace cascade {

namespace {

using Tri = Eigen::Triplet<cplx>;

SparseOp destroy_op(int n_max) {
    SparseOp a(n_max + 1, n_max + 1);
    std::vector<Tri> t;
    t.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseOp identity_op(int d) {
    SparseOp id(d, d);
    id.setIdentity();
    return id;
}

struct ModeOps {
    SparseOp a, b, ad, bd;
};

ModeOps mode_ops(int n_max) {
    const int d = n_max + 1;
    const SparseOp a1 = destroy_op(n_max), id = identity_op(d);
    ModeOps ops;
    ops.a = Eigen::kroneckerProduct(a1, id).eval();
    ops.b = Eigen::kroneckerProduct(id, a1).eval();
    ops.ad = SparseOp(ops.a.adjoint());
    ops.bd = SparseOp(ops.b.adjoint());
    return ops;
}

// trace(rho * op) = sum_{ij} rho(i,j) op(j,i); iterate the sparse factor only
cplx op_trace(const Eigen::MatrixXcd& rho, const SparseOp& op) {
    cplx acc = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SparseOp::InnerIterator it(op, k); it; ++it)
            acc += rho(it.col(), it.row()) * it.value();
    return acc;
}

// row-major stacking: vec(rho)[i*D + j] = rho(i, j), so vec(X rho Y) = kron(X, Y^T) vec(rho)
Eigen::VectorXcd vec_row_major(const Eigen::MatrixXcd& rho) {
    const int D = int(rho.rows());
    Eigen::VectorXcd v(D * D);
    Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        v.data(), D, D) = rho;
    return v;
}

Eigen::MatrixXcd unvec_row_major(const Eigen::VectorXcd& v, int D) {
    return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(v.data(), D, D);
}

void check_state_shape(const TruncatedDensityMatrix& dm) {
    const int D = (dm.n_max + 1) * (dm.n_max + 1);
    if (dm.n_max < 0 || dm.rho.rows() != D || dm.rho.cols() != D)
        throw std::invalid_argument("density matrix shape does not match its n_max");
}

// dy/dt = mat * y on the vectorized density matrix, with trace and Hermiticity
// checked after every accepted step.  Returns the number of accepted steps.
long integrate_vec(const SparseOp& mat, std::vector<cplx>& y, int D, double t_final,
                   double tol, double rate_scale) {
    namespace ode = boost::numeric::odeint;
    using state_t = std::vector<cplx>;
    auto system = [&mat](const state_t& s, state_t& dsdt, double) {
        dsdt.resize(s.size());
        Eigen::Map<const Eigen::VectorXcd> sm(s.data(), long(s.size()));
        Eigen::Map<Eigen::VectorXcd> dm(dsdt.data(), long(dsdt.size()));
        dm.noalias() = mat * sm;
    };
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<state_t>());

    cplx trace0 = 0.0;
    for (int i = 0; i < D; ++i) trace0 += y[std::size_t(i) * D + i];

    long accepted = 0;
    double t = 0.0;
    double dt = std::min(t_final, 0.1 / std::max(1.0, rate_scale));
    const double dt_min = t_final * 1e-14;
    for (;;) {
        const double remaining = t_final - t;
        if (remaining <= 0.0) break;
        const bool final_step = dt >= remaining;
        double trial = final_step ? remaining : dt;
        const auto outcome = stepper.try_step(system, y, t, trial);
        if (outcome == ode::success) {
            ++accepted;
            if (final_step) t = t_final;

            cplx trace = 0.0;
            for (int i = 0; i < D; ++i) trace += y[std::size_t(i) * D + i];
            const double drift = std::abs(trace - trace0);
            if (drift > 1e-6) {
                std::ostringstream msg;
                msg << "trace drifted by " << drift << " at t = " << t
                    << ": truncation leakage, increase n_max";
                throw std::runtime_error(msg.str());
            }
            double herm = 0.0;
            for (int i = 0; i < D; ++i)
                for (int j = i + 1; j < D; ++j)
                    herm = std::max(herm, std::abs(y[std::size_t(i) * D + j] -
                                                   std::conj(y[std::size_t(j) * D + i])));
            if (herm > 1e-6) {
                std::ostringstream msg;
                msg << "hermiticity defect " << herm << " at t = " << t;
                throw std::runtime_error(msg.str());
            }

            if (final_step) break;
            dt = trial;
        } else {
            dt = trial;
            if (dt < dt_min) {
                std::ostringstream msg;
                msg << "step size underflow at t = " << t << " (dt = " << dt << ")";
                throw std::runtime_error(msg.str());
            }
        }
    }
    return accepted;
}

double rate_scale_of(const SystemParams& p, int n_max) {
    // crude spectral-radius scale of the generator: rates times cutoff occupation
    return (p.kappa + p.gain_A + p.epsilon + 1.0) * (n_max + 1);
}

}  // namespace

void check_truncation(const TruncationSpec& t) {
    if (t.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    const long dim = long(t.n_max + 1) * (t.n_max + 1);
    if (dim > t.max_hilbert_dim) {
        std::ostringstream msg;
        msg << "Hilbert dimension " << dim << " exceeds the memory ceiling "
            << t.max_hilbert_dim;
        throw std::invalid_argument(msg.str());
    }
}

TruncatedDensityMatrix vacuum_state(const TruncationSpec& t) { return fock_state(t, 0, 0); }

TruncatedDensityMatrix fock_state(const TruncationSpec& t, int na, int nb) {
    check_truncation(t);
    if (na < 0 || nb < 0 || na > t.n_max || nb > t.n_max)
        throw std::invalid_argument("Fock occupation outside the truncated basis");
    const int d = t.n_max + 1, D = d * d;
    TruncatedDensityMatrix dm{t.n_max, Eigen::MatrixXcd::Zero(D, D)};
    dm.rho(na * d + nb, na * d + nb) = 1.0;
    return dm;
}

TruncatedDensityMatrix coherent_state(const TruncationSpec& t, cplx alpha_a, cplx alpha_b) {
    check_truncation(t);
    const int d = t.n_max + 1, D = d * d;
    Eigen::VectorXcd ca(d), cb(d);
    ca(0) = 1.0;
    cb(0) = 1.0;
    for (int n = 1; n < d; ++n) {
        ca(n) = ca(n - 1) * alpha_a / std::sqrt(double(n));
        cb(n) = cb(n - 1) * alpha_b / std::sqrt(double(n));
    }
    Eigen::VectorXcd psi(D);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) psi(i * d + j) = ca(i) * cb(j);
    psi /= psi.norm();  // reabsorb the truncated tail so the trace is exactly 1
    TruncatedDensityMatrix dm{t.n_max, psi * psi.adjoint()};
    return dm;
}

void check_density_matrix(const TruncatedDensityMatrix& dm) {
    check_state_shape(dm);
    const double herm = (dm.rho - dm.rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian (defect " << herm << ")";
        throw std::runtime_error(msg.str());
    }
    const double tr_err = std::abs(dm.rho.trace() - 1.0);
    if (tr_err > 1e-10) {
        std::ostringstream msg;
        msg << "density matrix trace is off by " << tr_err;
        throw std::runtime_error(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (dm.rho + dm.rho.adjoint()), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-8) {
        std::ostringstream msg;
        msg << "density matrix has eigenvalue " << min_eig << " below the truncation slack";
        throw std::runtime_error(msg.str());
    }
}

Liouvillian build_liouvillian(const SystemParams& p, const TruncationSpec& t) {
    check_params(p);
    check_truncation(t);
    const AtomicPrep prep = derive_atomic_prep(p.eta);
    const double A = p.gain_A, kappa = p.kappa, eps = p.epsilon;

    const ModeOps ops = mode_ops(t.n_max);
    const int D = (t.n_max + 1) * (t.n_max + 1);
    const SparseOp ID = identity_op(D);
    const auto L_of = [&](const SparseOp& X) { return Eigen::kroneckerProduct(X, ID).eval(); };
    const auto R_of = [&](const SparseOp& Y) {
        return Eigen::kroneckerProduct(ID, SparseOp(Y.transpose())).eval();
    };
    const auto S_of = [&](const SparseOp& X, const SparseOp& Y) {
        return Eigen::kroneckerProduct(X, SparseOp(Y.transpose())).eval();
    };
    const auto& a = ops.a;
    const auto& b = ops.b;
    const auto& ad = ops.ad;
    const auto& bd = ops.bd;

    Liouvillian lv;
    lv.params = p;
    lv.trunc = t;

    // eps [a^dag - a, rho] and the same for mode b
    SparseOp L = eps * (L_of(ad) - R_of(ad) - L_of(a) + R_of(a));
    lv.terms.push_back({"coherent_drive_a", eps});
    L += eps * (L_of(bd) - R_of(bd) - L_of(b) + R_of(b));
    lv.terms.push_back({"coherent_drive_b", eps});
    // gain: raising-operator dissipator on mode a at rate A rho_aa
    L += (A * prep.rho_aa / 2.0) * (2.0 * S_of(ad, a) - L_of(SparseOp(a * ad)) - R_of(SparseOp(a * ad)));
    lv.terms.push_back({"raising_gain_a", A * prep.rho_aa});
    // plain cavity decay on mode a
    L += (kappa / 2.0) * (2.0 * S_of(a, ad) - L_of(SparseOp(ad * a)) - R_of(SparseOp(ad * a)));
    lv.terms.push_back({"cavity_decay_a", kappa});
    // mode b decays through both the cavity and the atomic lower transition
    L += ((A * prep.rho_cc + kappa) / 2.0) *
         (2.0 * S_of(b, bd) - L_of(SparseOp(bd * b)) - R_of(SparseOp(bd * b)));
    lv.terms.push_back({"cavity_plus_atomic_decay_b", A * prep.rho_cc + kappa});
    // the two atomic-coherence cross terms coupling the modes
    L += (A * prep.rho_ac / 2.0) *
         (R_of(SparseOp(ad * bd)) + L_of(SparseOp(ad * bd)) - 2.0 * S_of(ad, bd));
    lv.terms.push_back({"coherence_cross_raising", A * prep.rho_ac});
    L += (A * prep.rho_ac / 2.0) * (R_of(SparseOp(a * b)) + L_of(SparseOp(a * b)) - 2.0 * S_of(b, a));
    lv.terms.push_back({"coherence_cross_lowering", A * prep.rho_ac});

    L.makeCompressed();
    lv.matrix = std::move(L);
    return lv;
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
    const int D = dim();
    if (rho.rows() != D || rho.cols() != D)
        throw std::invalid_argument("state dimension does not match the Liouvillian");
    return unvec_row_major(matrix * vec_row_major(rho), D);
}

double trace_leakage(const Liouvillian& lv, const TruncatedDensityMatrix& dm) {
    check_state_shape(dm);
    return std::abs(lv.apply(dm.rho).trace());
}

double tail_population(const TruncatedDensityMatrix& dm, int shells) {
    check_state_shape(dm);
    shells = std::clamp(shells, 1, dm.n_max + 1);
    const int d = dm.n_max + 1;
    double pop = 0.0;
    for (int na = 0; na < d; ++na)
        for (int nb = 0; nb < d; ++nb)
            if (std::max(na, nb) > dm.n_max - shells)
                pop += dm.rho(na * d + nb, na * d + nb).real();
    return pop;
}

MomentState extract_moments(const TruncatedDensityMatrix& dm) {
    check_state_shape(dm);
    const ModeOps ops = mode_ops(dm.n_max);
    MomentState s;
    s.m_a = op_trace(dm.rho, ops.a);
    s.m_b = op_trace(dm.rho, ops.b);
    s.s_aa = op_trace(dm.rho, SparseOp(ops.a * ops.a));
    s.s_bb = op_trace(dm.rho, SparseOp(ops.b * ops.b));
    s.n_a = op_trace(dm.rho, SparseOp(ops.ad * ops.a));
    s.n_b = op_trace(dm.rho, SparseOp(ops.bd * ops.b));
    s.x_abdag = op_trace(dm.rho, SparseOp(ops.a * ops.bd));
    s.x_ab = op_trace(dm.rho, SparseOp(ops.a * ops.b));
    return s;
}

TruncatedDensityMatrix oracle_steady_state(const SystemParams& p, const TruncationSpec& t,
                                           SteadySolveReport* report) {
    check_truncation(t);
    // stability is verified inside the linear solve; its occupations gate the
    // truncation budget (the oracle is only trustworthy at low excitation)
    const MomentState predicted = steady_state_linear_solve(p).state;
    const double occ = std::max(predicted.n_a.real(), predicted.n_b.real());
    const double budget = t.n_max / 3.0;
    if (occ > budget) {
        std::ostringstream msg;
        msg << "predicted per-mode occupation " << occ << " exceeds n_max/3 = " << budget
            << "; raise n_max or reduce the drive/gain";
        throw std::invalid_argument(msg.str());
    }

    const Liouvillian lv = build_liouvillian(p, t);
    const int D = lv.dim();
    const long DD = long(D) * D;

    // replace the first row of L with the trace functional: the kernel vector
    // normalized to trace 1 is then the unique solution of Msys x = e_0
    std::vector<Tri> tri;
    tri.reserve(std::size_t(lv.matrix.nonZeros()) + std::size_t(D));
    for (int k = 0; k < lv.matrix.outerSize(); ++k)
        for (SparseOp::InnerIterator it(lv.matrix, k); it; ++it)
            if (it.row() != 0) tri.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < D; ++i) tri.emplace_back(0, i * D + i, 1.0);
    SparseOp msys(DD, DD);
    msys.setFromTriplets(tri.begin(), tri.end());
    msys.makeCompressed();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(DD);
    rhs(0) = 1.0;

    // hermitize + normalize a candidate, then accept only if it actually
    // annihilates the generator and is physical
    const auto finalize = [&](const Eigen::VectorXcd& v, const std::string& path,
                              long iters) -> std::optional<TruncatedDensityMatrix> {
        if (!v.allFinite()) return std::nullopt;
        Eigen::MatrixXcd rho = unvec_row_major(v, D);
        rho = 0.5 * (rho + rho.adjoint().eval());
        const cplx tr = rho.trace();
        if (std::abs(tr) < 1e-8) return std::nullopt;
        rho /= tr;
        const double res = (lv.matrix * vec_row_major(rho)).norm();
        if (res > 1e-8) return std::nullopt;
        TruncatedDensityMatrix dm{t.n_max, std::move(rho)};
        try {
            check_density_matrix(dm);
        } catch (const std::runtime_error&) {
            return std::nullopt;
        }
        if (report) *report = {path, res, iters};
        return dm;
    };

    {
        Eigen::BiCGSTAB<SparseOp, Eigen::IncompleteLUT<cplx>> solver;
        solver.preconditioner().setDroptol(1e-5);
        solver.preconditioner().setFillfactor(12);
        solver.setTolerance(1e-13);
        solver.setMaxIterations(2000);
        solver.compute(msys);
        if (solver.info() == Eigen::Success) {
            const Eigen::VectorXcd v = solver.solve(rhs);
            if (auto dm = finalize(v, "bicgstab_ilut", solver.iterations())) return *dm;
        }
    }
    {
        Eigen::SparseLU<SparseOp, Eigen::COLAMDOrdering<int>> solver;
        solver.analyzePattern(msys);
        solver.factorize(msys);
        if (solver.info() == Eigen::Success) {
            const Eigen::VectorXcd v = solver.solve(rhs);
            if (auto dm = finalize(v, "sparse_lu", 0)) return *dm;
        }
    }
    {
        // relax from vacuum; the slowest decay rate sets the horizon
        const StabilityReport stab = check_stability(p);
        const double gap = std::max(1e-6, -stab.max_real_eigenvalue);
        std::vector<cplx> y(std::size_t(DD), cplx(0.0));
        y[0] = 1.0;
        long steps = 0;
        for (int chunk = 0; chunk < 64; ++chunk) {
            steps += integrate_vec(lv.matrix, y, D, 8.0 / gap, 1e-11,
                                   rate_scale_of(p, t.n_max));
            const Eigen::Map<const Eigen::VectorXcd> v(y.data(), DD);
            if ((lv.matrix * v).norm() <= 1e-10) {
                if (auto dm = finalize(v, "time_integration", steps)) return *dm;
            }
        }
        const Eigen::Map<const Eigen::VectorXcd> v(y.data(), DD);
        if (auto dm = finalize(v, "time_integration", steps)) return *dm;
    }
    throw std::runtime_error("steady-state solve did not converge on any path");
}

TruncatedDensityMatrix oracle_evolve(const TruncatedDensityMatrix& rho0, const SystemParams& p,
                                     double t_final, const TruncationSpec& t, double tol) {
    check_truncation(t);
    check_state_shape(rho0);
    if (rho0.n_max != t.n_max)
        throw std::invalid_argument("initial state truncation does not match the requested cutoff");
    if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");

    const Liouvillian lv = build_liouvillian(p, t);
    const int D = lv.dim();
    const Eigen::VectorXcd v0 = vec_row_major(rho0.rho);
    std::vector<cplx> y(v0.data(), v0.data() + v0.size());
    integrate_vec(lv.matrix, y, D, t_final, tol, rate_scale_of(p, t.n_max));
    const Eigen::Map<const Eigen::VectorXcd> v(y.data(), long(y.size()));
    return {t.n_max, unvec_row_major(v, D)};
}

TruncationReport truncation_check(const SystemParams& p, const TruncationSpec& t) {
    check_truncation(t);
    TruncationSpec fine{t.n_max + 4,
                        std::max(t.max_hilbert_dim, (t.n_max + 5) * (t.n_max + 5))};
    const TruncatedDensityMatrix base = oracle_steady_state(p, t);
    const TruncatedDensityMatrix refined = oracle_steady_state(p, fine);
    const MomentState mb = extract_moments(base);
    const MomentState mr = extract_moments(refined);

    TruncationReport rep;
    rep.n_max = t.n_max;
    rep.n_max_refined = fine.n_max;
    const auto listed = [](const MomentState& s) {
        return std::array<cplx, 8>{s.m_a, s.m_b, s.s_aa, s.s_bb,
                                   s.n_a, s.n_b, s.x_abdag, s.x_ab};
    };
    const std::array<cplx, 8> vb = listed(mb), vr = listed(mr);
    for (std::size_t i = 0; i < 8; ++i) {
        rep.moment_deltas[i] = std::abs(vr[i] - vb[i]);
        rep.max_moment_delta = std::max(rep.max_moment_delta, rep.moment_deltas[i]);
    }
    rep.tail = tail_population(base);
    rep.tail_refined = tail_population(refined);
    rep.flagged = rep.tail > 1e-4;
    if (rep.flagged) rep.note = "increase n_max";
    return rep;
}

std::string photon_distribution_csv(const TruncatedDensityMatrix& dm) {
    check_state_shape(dm);
    const int d = dm.n_max + 1;
    std::string out = "n_a,n_b,probability\n";
    for (int na = 0; na < d; ++na)
        for (int nb = 0; nb < d; ++nb) {
            out += std::to_string(na);
            out += ',';
            out += std::to_string(nb);
            out += ',';
            out += fmt_double(dm.rho(na * d + nb, na * d + nb).real());
            out += '\n';
        }
    return out;
}

}  // namespace cascade
