// Linear entropy, first-order entropy production, decoherence-rate
// certificates and epsilon-correlation regions.
//
// hbar = 1. The first-order linear entropy of a pure state phi is
//
//   S1(phi, t) = lambda^2 int_0^t ds sum_{k1 k2} g_{k1 k2} <phi(s)| da_{k1}^dag da_{k2} |phi(s)>,
//
// with da_k = a_k - <phi(s)|a_k|phi(s)> taken at the same time slice as the state.

#pragma once

#include "ssblab/dynamics.hpp"
#include "ssblab/environment.hpp"
#include "ssblab/models.hpp"
#include "ssblab/state.hpp"

#include <string>
#include <vector>

namespace ssblab::fragility {

double linear_entropy(const dynamics::DensityMatrix& rho);

// sum over channels of sum_{k1 k2} g_{k1 k2} <da_{k1}^dag da_{k2}> (no lambda^2).
double correlation_density(const ManyBodyState& phi, const env::InteractionSpec& interaction);

struct FirstOrderOptions {
    int n_quad = 64;             // Simpson intervals, even and >= 8
    bool check_convergence = true;
    double rel_tol = 1e-8;       // allowed change when n_quad doubles
};

struct FirstOrderResult {
    double value;             // S1(phi, t), from the refined grid
    int n_quad;               // intervals of the grid that produced value
    double refinement_change; // |S(2n) - S(n)|
    double integrand_start;   // lambda^2 * correlation_density at s = 0
};

// Throws ConvergenceError when doubling n_quad moves the result by more than rel_tol.
FirstOrderResult first_order_entropy(const ManyBodyState& phi,
                                     const dynamics::UnitaryEvolution& evolution,
                                     const env::InteractionSpec& interaction, double t,
                                     const FirstOrderOptions& options = {});

// S1 on the uniform grid times[i] = i * t_max / (n_points - 1), integrating each
// interval with `substeps` Simpson intervals.
std::vector<double> first_order_series(const ManyBodyState& phi,
                                       const dynamics::UnitaryEvolution& evolution,
                                       const env::InteractionSpec& interaction, double t_max,
                                       int n_points, int substeps = 8);

// Uniform time grid on [0, horizon] with n_points >= 2 samples.
std::vector<double> uniform_grid(double horizon, int n_points);

struct Certificate {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tolerance = 0.0;   // pass iff slack >= -tolerance (preconditions met)
    bool preconditions_met = false;
    bool passed = false;
    std::vector<std::string> notes;
    double time = 0.0;
    double lambda2 = 0.0;     // lambda^2 / hbar^2 prefactor
    int grid_points = 0;
};

inline constexpr double kCertificateTolerance = 1e-9;
inline constexpr double kTranslationTolerance = 1e-8;

// S1(phi, t) >= lambda^2 g00 <dA^dag dA> t, summed over channels, for translation-
// invariant phi whose intensive fluctuation is stationary.
Certificate theorem1_certificate(const ManyBodyState& phi,
                                 const dynamics::UnitaryEvolution& evolution,
                                 const env::InteractionSpec& interaction, double t,
                                 const FirstOrderOptions& options = {});

struct Theorem2Certificate {
    Certificate base;            // lhs = S1(Phi0) - S1(Xi), rhs = lambda^2 g00 t <dM^dag dM>_Phi0
    double s_afv = 0.0;
    double s_ppv = 0.0;
    double afv_fluctuation = 0.0;   // <Phi0| dM^dag dM |Phi0>
    double nu = 0.0;                // inf_{0<=t<=T} |<Xi(t)|M|Xi(t)>|
    double mixture = 0.0;           // |c+|^2 S1(Phi+) + |c-|^2 S1(Phi-)
    double mixture_defect = 0.0;    // S1(Phi0) - mixture
    double nu_defect = 0.0;         // lambda^2 g00 t max(0, <dM^dag dM>_Phi0 - nu^2)
    double epsilon_hat = 0.0;       // |mixture_defect| + nu_defect
    double c_plus = 0.0;
    double c_minus = 0.0;
    double horizon = 0.0;
};

struct Theorem2Options {
    FirstOrderOptions quadrature;
    int horizon_points = 64;     // >= 32; doubled once as a refinement check
};

// Requires a single channel whose one-site operator equals the order parameter m
// and a PPV with both parity components present.
Theorem2Certificate theorem2_certificate(const models::VacuumPair& pair,
                                         const dynamics::UnitaryEvolution& evolution,
                                         const env::InteractionSpec& interaction,
                                         const LocalOperatorField& order_parameter, double t,
                                         double horizon, const Theorem2Options& options = {});

// Closed-system trajectory phi(t) = exp(-iHt) phi.
struct StateTrajectory {
    const ManyBodyState& initial;
    const dynamics::UnitaryEvolution& evolution;

    ManyBodyState at(double t) const { return evolution.evolve(initial, t); }
};

struct CorrelationRegion {
    int reference = 0;
    double horizon = 0.0;
    double epsilon = 1.0;
    std::vector<int> members;
    std::vector<double> max_correlation;   // per site, sup over operators and grid times
    std::vector<int> zero_fluctuation;     // sites excluded because every fluctuation vanishes
    std::vector<double> grid;
    int local_dim = 2;

    int volume() const { return static_cast<int>(members.size()); }
    bool contains(int site) const;
};

inline constexpr double kRegionTolerance = 1e-10;

// Sites x whose canonical correlation with the reference site reaches epsilon at
// some time of the grid. The grid is refined once; a membership change throws
// ConvergenceError. Site-basis states only.
CorrelationRegion correlation_region(const StateTrajectory& trajectory, int reference,
                                     double epsilon, double horizon, int n_grid = 32);

// Largest canonical correlation between the one-site algebras at x and y for phi.
double canonical_correlation(const ManyBodyState& phi, int x, int y);

struct FluctuationBoundReport {
    std::vector<double> times;
    std::vector<double> lhs;  // <dA^dag dA>(t)
    std::vector<double> rhs;  // (|Omega|/|Lambda| + eps) <da(0)^dag da(0)>(t)
    double min_slack = 0.0;
    double volume_fraction = 0.0;  // |Omega| / |Lambda|
    bool holds = false;
    bool clustering = false;       // |Omega| < |Lambda|
};

FluctuationBoundReport intensive_fluctuation_bound(const StateTrajectory& trajectory,
                                                   const LocalOperatorField& field,
                                                   const CorrelationRegion& region);

struct EntropyReport {
    std::vector<double> times;
    std::vector<double> s_lin;        // from the master equation; may be empty
    std::vector<double> s_first;      // first-order series
    double lambda2 = 0.0;
    double gamma_hat = 0.0;
    double bound = 0.0;               // theorem-1 rate lambda^2 g00 <dA^dag dA>
    double slack = 0.0;               // gamma_hat - bound
};

EntropyReport first_order_report(const ManyBodyState& phi,
                                 const dynamics::UnitaryEvolution& evolution,
                                 const env::InteractionSpec& interaction, double t_max,
                                 int n_points);

struct RateEstimate {
    double gamma = 0.0;
    double window_end = 0.0;
    int points_used = 0;
    bool nonlinear = false;
    double max_relative_deviation = 0.0;
    std::vector<double> windowed_slopes;  // filled when nonlinear
};

// Least-squares slope of s_first through the origin over t in [0, 0.1/gamma_bootstrap].
RateEstimate rate_extract(const EntropyReport& report);
double rate_difference(const EntropyReport& afv, const EntropyReport& ppv);

// lambda^2 sum_channels g00 <dA^dag dA> at phi.
double theorem1_rate(const ManyBodyState& phi, const env::InteractionSpec& interaction);

}  // namespace ssblab::fragility
