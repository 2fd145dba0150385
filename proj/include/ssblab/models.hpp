// Ising and free-boson builders, vacuum pairs and parity decomposition.

#pragma once

#include "ssblab/lattice.hpp"
#include "ssblab/operators.hpp"
#include "ssblab/state.hpp"
#include "ssblab/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ssblab::models {

// Largest number of spins the Ising builder accepts (dense paths need 2^N <= 2^14).
inline constexpr int kMaxIsingSites = 14;

struct Bond {
    int x;
    int y;
};

// H = -J sum_<x,y> s3(x) s3(y) - h sum_x s1(x).
//
// Bonds are (x, x + e_mu) for every site and direction, so a periodic chain of
// L sites has L bonds. For L = 2 this lists the pair {0,1} twice, once per
// geometric edge of the ring. h is the symmetry-preserving perturbation hook:
// s1 commutes with the spin-flip parity P = prod_x s1(x).
struct IsingModel {
    lattice::Lattice lattice;
    double coupling;
    double transverse_field;
    TensorSpace space;
    std::vector<Bond> bonds;
    SpMat hamiltonian;
    SpMat parity;

    LocalOperatorField order_field() const;  // m(x) = s3(x)
    SiteOperators order_operators() const;
    SpMat magnetization() const;             // S_{3,Lambda}
};

IsingModel build_ising(int linear_size, int dimension, double coupling,
                       double transverse_field = 0.0);

ManyBodyState xi_plus(const IsingModel& model);   // |++...+>
ManyBodyState xi_minus(const IsingModel& model);  // |--...->

struct ParityParts {
    cplx c_plus{0.0, 0.0};
    cplx c_minus{0.0, 0.0};
    std::optional<ManyBodyState> phi_plus;   // absent when c_plus == 0
    std::optional<ManyBodyState> phi_minus;  // absent when c_minus == 0
};

// state = c_+ Phi_+ + c_- Phi_- with Phi_pm = (1 +- P) state / ||(1 +- P) state||.
ParityParts parity_decompose(const ManyBodyState& state, const SpMat& parity);
// Sum c_+ Phi_+ + c_- Phi_- as an amplitude vector.
Vec reconstruct(const ParityParts& parts, Eigen::Index dim);

struct VacuumPair {
    ManyBodyState afv;  // symmetric ground state Phi_0
    ManyBodyState ppv;  // symmetry-broken state Xi
    ParityParts ppv_parity;
};

// Phi_0 = (Xi_+ + Xi_-)/sqrt 2 and Xi = Xi_+. Requires transverse_field == 0.
VacuumPair build_afv_ising(const IsingModel& model);

// From the spectrum: Phi_0 is the lowest even eigenstate, Phi_1 the lowest odd
// one, and Xi = (Phi_0 + Phi_1)/sqrt 2 with the relative phase chosen so that
// <Xi|M|Xi> > 0. Falls back to build_afv_ising when the field is zero.
VacuumPair build_spectral_pair(const IsingModel& model);

// Mean-field product states (cos(t/2)|+> +- sin(t/2)|->)^{(x)N} and their parity
// image; the tilt defaults to asin(h / 2Jd) (zero for the bare model).
std::pair<ManyBodyState, ManyBodyState> mean_field_ppv_pair(
    const IsingModel& model, std::optional<double> tilt = std::nullopt);

// Free bosons in a periodic box, represented in momentum-mode Fock space.
//
// psi(x) = |Lambda|^{-1/2} sum_k e^{ikx} c_k so that [psi(x), psi^dag(y)] = delta_xy
// away from the cutoff. With this normalisation M_Lambda = |Lambda|^{-1/2} c_0 and
// a coherent amplitude alpha in the k = 0 mode gives <M_Lambda> = alpha / sqrt|Lambda|.
struct FreeBosonModel {
    lattice::Lattice lattice;
    double hopping;
    RealVec dispersion;      // eps_k = 2 t sum_mu (1 - cos k_mu), minimal at k = 0
    std::vector<int> cutoffs;  // n_max per mode
    TensorSpace space;
    SpMat hamiltonian;       // sum_k eps_k c_k^dag c_k (diagonal)
    std::vector<SpMat> modes;  // c_k

    SiteOperators psi() const;
    SiteOperators psi_dag() const;
    SpMat order_parameter() const;  // M_Lambda
    SpMat number(int k_index) const;
};

// n_max_excited < 0 uses n_max for every mode.
FreeBosonModel build_free_boson(int linear_size, int dimension, int n_max, int n_max_excited = -1,
                                double hopping = 1.0);

inline constexpr double kTruncationWeightLimit = 1e-8;

struct BosonStates {
    ManyBodyState number;    // |N> in k = 0, vacuum elsewhere
    ManyBodyState coherent;  // |alpha> in k = 0, truncated and renormalised
    double number_top_weight;
    double coherent_top_weight;
    bool number_reliable;
    bool coherent_reliable;
};

BosonStates build_boson_states(const FreeBosonModel& model, int particles, cplx alpha);

// Largest weight any mode carries on its top Fock level.
double top_level_weight(const ManyBodyState& state, const std::vector<int>& cutoffs);

}  // namespace ssblab::models
