// Environment correlation models and the coupling to the lattice.
//
// The environment enters only through its correlation data. With a separable
// kernel <b^dag(x) b(y,s)> = f(x-y) h(s) and gbar = (1/2) int h(s) ds,
//
//     g_{k1 k2} = gbar sum_{x,y in C} f(x-y) e^{i k1 x} e^{-i k2 y},
//
// where C is the contact region and the bath modes are b_k = sum_{x in C} b(x) e^{-ikx}.

#pragma once

#include "ssblab/lattice.hpp"
#include "ssblab/operators.hpp"
#include "ssblab/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ssblab::env {

enum class KernelKind { Constant, Exponential, Delta, Tabulated };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);  // throws DomainError

// Spatial part f(r) of the bath correlation. Exponential uses exp(-r/xi) of the
// minimum-image Euclidean distance; Tabulated holds f on every separation index
// of Z_L^d (site-index order, f(0) first).
struct SpatialKernel {
    KernelKind kind = KernelKind::Delta;
    double range = 1.0;          // xi_E for Exponential
    std::vector<double> table;   // Tabulated values

    static SpatialKernel constant();
    static SpatialKernel exponential(double xi);
    static SpatialKernel delta();
    static SpatialKernel tabulated(std::vector<double> values);

    double value(const lattice::Lattice& lattice, int separation_index) const;
};

// Fourier transform f^(q) = sum_r f(r) e^{-iqr} over the momentum grid (real part).
RealVec kernel_spectrum(const SpatialKernel& kernel, const lattice::Lattice& lattice);

// Correlation volume |Lambda_E^corr| = sum_r f(r) / f(0).
double correlation_volume(const SpatialKernel& kernel, const lattice::Lattice& lattice);

struct EnvCorrelation {
    lattice::Lattice lattice;
    SpatialKernel kernel;
    double weight;              // gbar
    std::vector<int> contact;   // sorted, unique
    Mat g;                      // |Lambda| x |Lambda| over momentum indices
    double g00;
    double correlation_time = 0.0;  // tau_c, metadata only
    std::string channel;        // e.g. "+" / "-" for the two boson channels

    double min_eigenvalue() const;
    double max_eigenvalue() const;
    bool positive_semidefinite(double rel_tol = 1e-10) const;

    // True when the declared energy spread exceeds hbar / tau_c (Markov regime left).
    bool markov_warning(double energy_spread) const;
};

// Throws PositivityError when the kernel has a negative Fourier component and
// DomainError when the contact region is empty or leaves the lattice.
EnvCorrelation build_g_matrix(const SpatialKernel& kernel, double weight,
                              std::vector<int> contact, const lattice::Lattice& lattice);

// Same inputs, new contact region.
EnvCorrelation restrict_contact(const EnvCorrelation& corr, std::vector<int> contact);

// Wraps a hand-supplied matrix (used to inject deliberately invalid g in tests
// and the verify command). No positivity check is made here.
EnvCorrelation from_matrix(Mat g, const lattice::Lattice& lattice, std::string channel = {});

// gbar * sum_{x,y in C} f(x-y), evaluated directly in real space.
double direct_g00(const SpatialKernel& kernel, double weight, const std::vector<int>& contact,
                  const lattice::Lattice& lattice);

enum class Regime { LongRange, ShortRange, Degenerate };
std::string to_string(Regime regime);

struct RegimeReport {
    Regime regime;
    double contact_volume;       // |Lambda_C|
    double correlation_volume;   // |Lambda_E^corr|
    double long_range_estimate;  // gbar f(0) |C|^2
    double short_range_estimate; // gbar f(0) |C| min(|Lambda_E^corr|, |C|)
    double predicted;            // estimate of the selected regime
    double exact;                // g00
    double ratio;                // exact / predicted
};

RegimeReport scaling_regime(const EnvCorrelation& corr);

void write_g_csv(std::ostream& out, const EnvCorrelation& corr);

// Contiguous block of n sites starting at site 0 (row-major order).
std::vector<int> leading_sites(int n, const lattice::Lattice& lattice);
std::vector<int> all_sites(const lattice::Lattice& lattice);

// One term lambda * sum_{x in C} a(x) (x) b(x) of the system-environment coupling.
struct Channel {
    std::string label;
    SiteOperators op;   // a(x) on the full principal-system space
    std::optional<Mat> site_op;  // the one-site matrix, when a(x) is a spin-type site operator
    EnvCorrelation corr;
};

// H_int = lambda sum_l sum_{x in C_l} a_l(x) (x) b_l(x); channels are mutually uncorrelated.
struct InteractionSpec {
    double lambda = 0.0;
    std::vector<Channel> channels;

    void validate() const;  // lambda >= 0, finite, operators match the lattice
    Eigen::Index dim() const;
};

InteractionSpec single_channel(double lambda, const LocalOperatorField& field,
                               const lattice::Lattice& lattice, const TensorSpace& space,
                               EnvCorrelation corr);

}  // namespace ssblab::env
