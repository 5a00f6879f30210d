#pragma once
#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cascade/moments.hpp"
#include "cascade/params.hpp"

namespace cascade {

using SparseOp = Eigen::SparseMatrix<cplx>;

// Hard Fock cutoff per mode: dimension (n_max+1) per mode, (n_max+1)^2 total.
// Truncation is a plain cutoff with leakage monitoring, never renormalized --
// the error stays observable instead of being silently absorbed.
struct TruncationSpec {
    int n_max = 12;
    int max_hilbert_dim = 1024;  // ceiling on (n_max+1)^2
};

// n_max >= 1 and (n_max+1)^2 within the ceiling; throws std::invalid_argument.
void check_truncation(const TruncationSpec& t);

// Density matrix on the product basis |n_a> (x) |n_b>, row index n_a*(n_max+1)+n_b.
struct TruncatedDensityMatrix {
    int n_max = 0;
    Eigen::MatrixXcd rho;
};

TruncatedDensityMatrix vacuum_state(const TruncationSpec& t);
TruncatedDensityMatrix fock_state(const TruncationSpec& t, int na, int nb);
// Truncated |alpha_a> (x) |alpha_b> projector, trace renormalized to 1.
TruncatedDensityMatrix coherent_state(const TruncationSpec& t, cplx alpha_a, cplx alpha_b);

// Hermitian to 1e-12, trace 1 to 1e-10, smallest eigenvalue >= -1e-8
// (truncation slack).  Throws std::runtime_error naming the violation.
void check_density_matrix(const TruncatedDensityMatrix& dm);

struct LiouvillianTerm {
    std::string label;
    double rate;
};

// Sparse generator acting on row-major-vectorized density matrices:
// vec(X rho Y) = kron(X, Y^T) vec(rho).  Every term is a commutator or a
// Lindblad dissipator of truncated ladder operators, so the composed map is
// exactly trace-preserving at finite cutoff; truncation error appears as
// distorted dynamics near the boundary shells (see tail_population), not as
// trace loss.
struct Liouvillian {
    SystemParams params;
    TruncationSpec trunc;
    SparseOp matrix;  // D^2 x D^2 with D = (n_max+1)^2
    std::vector<LiouvillianTerm> terms;  // audit list, one entry per generator line
    int mode_dim() const { return trunc.n_max + 1; }
    int dim() const { return mode_dim() * mode_dim(); }
    // d(rho)/dt in matrix form
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
};

// Term-by-term assembly: two coherent drives, raising-operator gain at rate
// A*rho_aa, cavity decay kappa on mode a, decay A*rho_cc + kappa on mode b,
// and the two cross-coherence lines at rate A*rho_ac.
Liouvillian build_liouvillian(const SystemParams& p, const TruncationSpec& t);

// |trace(L[rho])| -- identically ~machine zero for the hard-cutoff composition.
double trace_leakage(const Liouvillian& lv, const TruncatedDensityMatrix& dm);

// Population within the outermost `shells` diagonal shells, i.e. states with
// max(n_a, n_b) > n_max - shells.  The truncation-quality diagnostic.
double tail_population(const TruncatedDensityMatrix& dm, int shells = 1);

// The eight stored moments as trace(rho * op) with truncated operators.
MomentState extract_moments(const TruncatedDensityMatrix& dm);

struct SteadySolveReport {
    std::string path;      // "bicgstab_ilut" | "sparse_lu" | "time_integration"
    double residual = 0;   // ||L[rho]||_2 of the returned state
    long iterations = 0;   // solver iterations / accepted integrator steps
};

// Steady state of L[rho] = 0 with the trace-1 constraint replacing one row.
// Preconditioned iterative solve first, direct sparse LU as fallback, and
// long-time integration from vacuum as the last resort.  The result is
// symmetrized and trace-normalized.  Preconditions: stable parameters and
// predicted per-mode occupation <= n_max/3 (throws std::invalid_argument
// otherwise -- the oracle is a low-excitation instrument by design).
TruncatedDensityMatrix oracle_steady_state(const SystemParams& p, const TruncationSpec& t,
                                           SteadySolveReport* report = nullptr);

// Adaptive integration of d(rho)/dt = L[rho]; trace and Hermiticity checked on
// every accepted step, aborting (std::runtime_error) if the trace drifts more
// than 1e-6 from its initial value -- that is truncation leakage showing up as
// boundary distortion, and the fix is a larger n_max.
TruncatedDensityMatrix oracle_evolve(const TruncatedDensityMatrix& rho0, const SystemParams& p,
                                     double t_final, const TruncationSpec& t,
                                     double tol = 1e-10);

struct TruncationReport {
    int n_max = 0;
    int n_max_refined = 0;
    std::array<double, 8> moment_deltas{};  // |refined - base|, stored-moment order
    double max_moment_delta = 0;
    double tail = 0;          // boundary-shell population at the base truncation
    double tail_refined = 0;
    bool flagged = false;     // tail > 1e-4
    std::string note;
};

// Convergence probe: steady-state moments at n_max vs n_max + 4.
TruncationReport truncation_check(const SystemParams& p, const TruncationSpec& t);

// Diagnostic dump "n_a,n_b,probability", one row per basis state.
std::string photon_distribution_csv(const TruncatedDensityMatrix& dm);

}  // namespace cascade
