// Many-body state vectors and lattice translations.

#include "ssblab/state.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ssblab {

ManyBodyState::ManyBodyState(Vec amplitudes, lattice::Lattice lattice, TensorSpace space,
                             Basis basis)
    : amplitudes_(std::move(amplitudes)),
      lattice_(std::move(lattice)),
      space_(std::move(space)),
      basis_(basis) {
    if (amplitudes_.size() != space_.dim()) {
        throw DimensionError("ManyBodyState: amplitude vector has length " +
                             std::to_string(amplitudes_.size()) + ", space dimension is " +
                             std::to_string(space_.dim()));
    }
    if (space_.factors() != lattice_.volume()) {
        throw DimensionError("ManyBodyState: space factors do not match lattice volume");
    }
    const double n = amplitudes_.norm();
    if (std::abs(n - 1.0) > kNormTolerance) {
        throw DomainError("ManyBodyState: state norm " + std::to_string(n) + " differs from 1");
    }
}

ManyBodyState ManyBodyState::normalized(Vec amplitudes, lattice::Lattice lattice,
                                        TensorSpace space, Basis basis) {
    const double n = amplitudes.norm();
    if (n == 0.0 || !std::isfinite(n)) {
        throw DomainError("ManyBodyState: cannot normalise a zero or non-finite vector");
    }
    amplitudes /= n;
    return ManyBodyState(std::move(amplitudes), std::move(lattice), std::move(space), basis);
}

cplx ManyBodyState::expectation(const SpMat& op) const {
    if (op.rows() != dim() || op.cols() != dim()) {
        throw DimensionError("ManyBodyState::expectation: operator dimension mismatch");
    }
    return amplitudes_.dot(op * amplitudes_);
}

cplx ManyBodyState::overlap(const ManyBodyState& other) const {
    if (other.dim() != dim()) {
        throw DimensionError("ManyBodyState::overlap: dimension mismatch");
    }
    return amplitudes_.dot(other.amplitudes_);
}

ManyBodyState ManyBodyState::with_amplitudes(Vec amplitudes) const {
    return ManyBodyState(std::move(amplitudes), lattice_, space_, basis_);
}

ManyBodyState translate_state(const ManyBodyState& state, std::span<const int> shift) {
    const auto& lat = state.lattice();
    const auto& space = state.space();
    if (static_cast<int>(shift.size()) != lat.dimension()) {
        throw DimensionError("translate_state: shift has wrong dimension");
    }
    const Vec& in = state.amplitudes();
    Vec out(in.size());
    if (state.basis() == Basis::Site) {
        std::vector<int> target(static_cast<std::size_t>(lat.volume()));
        for (int x = 0; x < lat.volume(); ++x) {
            target[static_cast<std::size_t>(x)] = lat.shifted(x, shift);
        }
        std::vector<int> out_digits(static_cast<std::size_t>(lat.volume()));
        for (Eigen::Index i = 0; i < in.size(); ++i) {
            const std::vector<int> d = space.digits(i);
            for (std::size_t x = 0; x < d.size(); ++x) {
                out_digits[static_cast<std::size_t>(target[x])] = d[x];
            }
            out(space.compose(out_digits)) = in(i);
        }
    } else {
        // Mode k picks up e^{-i k.shift} per quantum.
        std::vector<long long> n_dot_shift(static_cast<std::size_t>(lat.volume()));
        for (int k = 0; k < lat.volume(); ++k) {
            const lattice::Coord n = lat.coord(k);
            long long dot = 0;
            for (std::size_t mu = 0; mu < n.size(); ++mu) dot += static_cast<long long>(n[mu]) * shift[mu];
            n_dot_shift[static_cast<std::size_t>(k)] = dot;
        }
        const int L = lat.linear_size();
        for (Eigen::Index i = 0; i < in.size(); ++i) {
            const std::vector<int> occ = space.digits(i);
            long long total = 0;
            for (std::size_t k = 0; k < occ.size(); ++k) total += occ[k] * n_dot_shift[k];
            const double arg = -2.0 * std::numbers::pi * static_cast<double>(total % L) / L;
            out(i) = in(i) * cplx{std::cos(arg), std::sin(arg)};
        }
    }
    return state.with_amplitudes(std::move(out));
}

double fluctuation(const ManyBodyState& state, const SpMat& op) {
    const Vec& phi = state.amplitudes();
    const cplx mean = state.expectation(op);
    const Vec delta = op * phi - mean * phi;
    return delta.squaredNorm();
}

double symmetrized_fluctuation(const ManyBodyState& state, const SpMat& op) {
    const Vec& phi = state.amplitudes();
    const cplx mean = state.expectation(op);
    const Vec delta = op * phi - mean * phi;
    const SpMat op_dag = op.adjoint();
    const Vec delta_dag = op_dag * phi - std::conj(mean) * phi;
    return 0.5 * (delta.squaredNorm() + delta_dag.squaredNorm());
}

double unit_translation_overlap(const ManyBodyState& state) {
    const int d = state.lattice().dimension();
    double worst = 1.0;
    for (int mu = 0; mu < d; ++mu) {
        std::vector<int> shift(static_cast<std::size_t>(d), 0);
        shift[static_cast<std::size_t>(mu)] = 1;
        worst = std::min(worst, std::abs(state.overlap(translate_state(state, shift))));
    }
    return worst;
}

}  // namespace ssblab
