// Normalised many-body state vectors on a lattice.

#pragma once

#include "ssblab/lattice.hpp"
#include "ssblab/operators.hpp"
#include "ssblab/types.hpp"

#include <span>

namespace ssblab {

// Site basis: tensor factor x is lattice site x. Mode basis: tensor factor k is
// the Fock space of momentum mode k (same row-major indexing as sites).
enum class Basis { Site, Mode };

class ManyBodyState {
public:
    static constexpr double kNormTolerance = 1e-12;

    // Throws DomainError unless the amplitudes are normalised within kNormTolerance.
    ManyBodyState(Vec amplitudes, lattice::Lattice lattice, TensorSpace space,
                  Basis basis = Basis::Site);
    // Normalises first; throws DomainError on a zero vector.
    static ManyBodyState normalized(Vec amplitudes, lattice::Lattice lattice, TensorSpace space,
                                    Basis basis = Basis::Site);

    const Vec& amplitudes() const noexcept { return amplitudes_; }
    const lattice::Lattice& lattice() const noexcept { return lattice_; }
    const TensorSpace& space() const noexcept { return space_; }
    Basis basis() const noexcept { return basis_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }

    cplx expectation(const SpMat& op) const;
    cplx overlap(const ManyBodyState& other) const;  // <this|other>

    ManyBodyState with_amplitudes(Vec amplitudes) const;

private:
    Vec amplitudes_;
    lattice::Lattice lattice_;
    TensorSpace space_;
    Basis basis_;
};

// Lattice translation x -> x + shift. Site basis: permutation of the tensor
// factors. Mode basis: phase exp(-i shift.sum_k k n_k) on each Fock configuration.
ManyBodyState translate_state(const ManyBodyState& state, std::span<const int> shift);

// <dA^dag dA> with dA = A - <A>.
double fluctuation(const ManyBodyState& state, const SpMat& op);
// (1/2)<dA^dag dA + dA dA^dag>.
double symmetrized_fluctuation(const ManyBodyState& state, const SpMat& op);

// |<phi|T_e phi>| for a unit translation along every lattice direction.
double unit_translation_overlap(const ManyBodyState& state);

}  // namespace ssblab
