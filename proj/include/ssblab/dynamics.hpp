// Closed-system evolution and the Markovian master equation.
//
// hbar = 1 throughout. The master equation integrated here is
//
//   d rho/dt = -i[H, rho] + lambda^2 sum_{k1 k2} g_{k1 k2} (2 a_{k2} rho a_{k1}^dag
//                                                   - {a_{k1}^dag a_{k2}, rho})
//
// summed over uncorrelated channels. g is diagonalised once, g = sum_j mu_j u_j u_j^dag,
// which turns the double momentum sum into jump operators L_j = sum_k conj(u_j[k]) a_k.

#pragma once

#include "ssblab/environment.hpp"
#include "ssblab/state.hpp"
#include "ssblab/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ssblab::dynamics {

// Largest dimension for which dense spectral decompositions are formed.
inline constexpr Eigen::Index kDenseLimit = 4096;

struct SpectralDecomposition {
    RealVec energies;  // ascending
    Mat vectors;       // columns are eigenvectors
    std::string tag;

    static SpectralDecomposition of(const SpMat& hamiltonian, std::string tag = {});
    double reconstruction_error(const SpMat& hamiltonian) const;  // ||H - V E V^dag|| / ||H||
    double unitarity_error() const;                                // ||V^dag V - I||
};

// exp(-iHt) on vectors. Diagonal Hamiltonians use phases, small ones a dense
// eigendecomposition, and large ones a restarted Lanczos exponential.
class UnitaryEvolution {
public:
    enum class Method { Diagonal, Spectral, Krylov };

    explicit UnitaryEvolution(SpMat hamiltonian, std::string tag = {},
                              std::optional<Method> force = std::nullopt);

    Method method() const noexcept { return method_; }
    const SpMat& hamiltonian() const noexcept { return h_; }
    const SpectralDecomposition* spectral() const noexcept {
        return spectral_ ? &*spectral_ : nullptr;
    }
    const RealVec& diagonal() const noexcept { return diag_; }
    Eigen::Index dim() const noexcept { return h_.rows(); }

    Vec apply(const Vec& v, double t) const;
    ManyBodyState evolve(const ManyBodyState& state, double t) const;

    // sqrt(<H^2> - <H>^2) for the given state.
    double energy_spread(const ManyBodyState& state) const;

private:
    Vec krylov_apply(const Vec& v, double t) const;

    SpMat h_;
    Method method_;
    RealVec diag_;
    std::optional<SpectralDecomposition> spectral_;
    double norm_bound_ = 0.0;
};

ManyBodyState evolve_state(const ManyBodyState& state, const SpMat& hamiltonian, double t);

// exp(iHs) op exp(-iHs) as a dense matrix (dimension at most kDenseLimit).
Mat heisenberg_picture(const SpMat& op, const UnitaryEvolution& evolution, double s);
Mat heisenberg_picture(const SpMat& op, const SpMat& hamiltonian, double s);

class DensityMatrix {
public:
    DensityMatrix(Mat rho, double time = 0.0);
    static DensityMatrix pure(const ManyBodyState& state, double time = 0.0);

    const Mat& matrix() const noexcept { return rho_; }
    double time() const noexcept { return t_; }
    Eigen::Index dim() const noexcept { return rho_.rows(); }

    cplx trace() const { return rho_.trace(); }
    double purity() const;   // tr rho^2
    double hermiticity_error() const;
    double min_eigenvalue() const;
    cplx expectation(const SpMat& op) const;  // tr(rho A)

private:
    Mat rho_;
    double t_;
};

struct Jump {
    std::string channel;
    double rate;  // lambda^2 mu_j
    SpMat op;     // L_j
};

class LindbladGenerator {
public:
    // Throws PositivityError when a channel's g is not positive semidefinite.
    LindbladGenerator(SpMat hamiltonian, const env::InteractionSpec& interaction);

    Mat apply(const Mat& rho) const;
    // 0.1 min(1/||H||, 1/(lambda^2 ||g|| ||a||^2)): the step-size ceiling.
    double step_limit() const noexcept { return step_limit_; }
    const std::vector<Jump>& jumps() const noexcept { return jumps_; }
    const SpMat& hamiltonian() const noexcept { return h_; }
    Eigen::Index dim() const noexcept { return h_.rows(); }

    // d S_lin / dt = -2 Re tr(rho L(rho)).
    double linear_entropy_rate(const Mat& rho) const;

private:
    SpMat h_;
    SpMat effective_;  // H - i sum_j rate_j L_j^dag L_j
    std::vector<Jump> jumps_;
    std::vector<SpMat> jumps_dag_;
    double step_limit_ = 0.0;
};

inline constexpr double kTraceRenormaliseThreshold = 1e-12;
inline constexpr double kPositivityAbort = 1e-6;

struct StepResult {
    DensityMatrix rho;
    double trace_drift;  // |tr rho - 1| before any renormalisation
    bool renormalised;
};

// One classical RK4 step. Throws DomainError when dt exceeds the step limit.
StepResult lindblad_step(const DensityMatrix& rho, const LindbladGenerator& generator, double dt);

struct TrajectoryRow {
    double t;
    double linear_entropy;
    double trace;
    double min_eigenvalue;
    cplx order_parameter;
    double order_fluctuation;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::vector<DensityMatrix> snapshots;
    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;
    int renormalisations = 0;
    int n_steps = 0;

    const DensityMatrix& final_state() const { return snapshots.back(); }
};

struct PropagateOptions {
    int sample_every = 1;          // rows/snapshots every this many steps (final always kept)
    int eigen_check_every = 1;     // positivity checked on sampled steps only
    std::optional<SpMat> observable;  // M for the <M>, <dM^dag dM> columns
};

// n_steps >= 10 fixed RK4 steps to t_final. t_final == 0 returns [rho0].
Trajectory propagate(const DensityMatrix& rho0, const LindbladGenerator& generator,
                     double t_final, int n_steps, const PropagateOptions& options = {});

struct RichardsonStudy {
    int base_steps;
    double s_coarse;  // S_lin(t_final) with base_steps
    double s_mid;     // 2 * base_steps
    double s_fine;    // 4 * base_steps
    double ratio;     // (s_coarse - s_mid) / (s_mid - s_fine)
    bool resolvable;  // differences above the round-off floor
    double halving_change;  // |s_mid - s_fine| / |s_fine|
};

RichardsonStudy richardson_study(const DensityMatrix& rho0, const LindbladGenerator& generator,
                                 double t_final, int base_steps);

// Smallest step count (n >= 10) that respects the generator's step limit.
int minimum_steps(const LindbladGenerator& generator, double t_final);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace ssblab::dynamics
