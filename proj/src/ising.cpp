// Ising lattice, its symmetry-broken and symmetric vacua.

#include "ssblab/models.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssblab::models {

LocalOperatorField IsingModel::order_field() const { return LocalOperatorField(ops::s3(), "s3"); }

SiteOperators IsingModel::order_operators() const {
    return embed_field(order_field(), lattice, space);
}

SpMat IsingModel::magnetization() const { return build_intensive(order_field(), lattice, space); }

IsingModel build_ising(int linear_size, int dimension, double coupling, double transverse_field) {
    if (linear_size < 2) {
        throw DomainError("build_ising: linear size must be >= 2, got " +
                          std::to_string(linear_size));
    }
    if (!std::isfinite(coupling) || !std::isfinite(transverse_field)) {
        throw DomainError("build_ising: couplings must be finite");
    }
    const lattice::Lattice lat(dimension, linear_size);
    if (lat.volume() > kMaxIsingSites) {
        int largest = 1;
        while (std::pow(largest + 1, dimension) <= kMaxIsingSites) ++largest;
        throw DimensionError("build_ising: " + std::to_string(lat.volume()) +
                             " sites exceed the limit of " + std::to_string(kMaxIsingSites) +
                             "; largest feasible L for d = " + std::to_string(dimension) + " is " +
                             std::to_string(largest));
    }
    TensorSpace space = TensorSpace::uniform(lat.volume(), 2);

    std::vector<Bond> bonds;
    for (int x = 0; x < lat.volume(); ++x) {
        for (int mu = 0; mu < dimension; ++mu) bonds.push_back({x, lat.neighbor(x, mu)});
    }

    // s3 s3 is diagonal: accumulate it directly from the bit pattern.
    const Eigen::Index dim = space.dim();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(dim) * (1 + lat.volume()));
    for (Eigen::Index i = 0; i < dim; ++i) {
        double e = 0.0;
        for (const Bond& b : bonds) {
            const int sx = space.digit(i, b.x) == 0 ? 1 : -1;
            const int sy = space.digit(i, b.y) == 0 ? 1 : -1;
            e -= coupling * sx * sy;
        }
        trips.emplace_back(i, i, e);
        if (transverse_field != 0.0) {
            for (int x = 0; x < lat.volume(); ++x) {
                const Eigen::Index flipped =
                    i + (space.digit(i, x) == 0 ? 1 : -1) * space.stride(x);
                trips.emplace_back(flipped, i, -transverse_field);
            }
        }
    }
    SpMat h(dim, dim);
    h.setFromTriplets(trips.begin(), trips.end());

    SpMat parity = product_over_sites(ops::s1(), space);
    return IsingModel{lat, coupling, transverse_field, std::move(space), std::move(bonds),
                      std::move(h), std::move(parity)};
}

namespace {

ManyBodyState uniform_product(const IsingModel& model, int local_state) {
    Vec amps = Vec::Zero(model.space.dim());
    std::vector<int> digits(static_cast<std::size_t>(model.lattice.volume()), local_state);
    amps(model.space.compose(digits)) = 1.0;
    return ManyBodyState(std::move(amps), model.lattice, model.space);
}

}  // namespace

ManyBodyState xi_plus(const IsingModel& model) { return uniform_product(model, 0); }
ManyBodyState xi_minus(const IsingModel& model) { return uniform_product(model, 1); }

ParityParts parity_decompose(const ManyBodyState& state, const SpMat& parity) {
    if (parity.rows() != state.dim()) {
        throw DimensionError("parity_decompose: parity operator dimension mismatch");
    }
    const SpMat sq = parity * parity;
    SpMat id(parity.rows(), parity.cols());
    id.setIdentity();
    if (SpMat(sq - id).norm() > 1e-10) {
        throw DomainError("parity_decompose: operator does not square to the identity");
    }
    const Vec& phi = state.amplitudes();
    const Vec p_phi = parity * phi;
    const Vec even = 0.5 * (phi + p_phi);
    const Vec odd = 0.5 * (phi - p_phi);

    ParityParts parts;
    constexpr double kAbsent = 1e-14;
    const double ne = even.norm();
    const double no = odd.norm();
    if (ne > kAbsent) {
        parts.c_plus = ne;
        parts.phi_plus = state.with_amplitudes(even / ne);
    }
    if (no > kAbsent) {
        parts.c_minus = no;
        parts.phi_minus = state.with_amplitudes(odd / no);
    }
    return parts;
}

Vec reconstruct(const ParityParts& parts, Eigen::Index dim) {
    Vec out = Vec::Zero(dim);
    if (parts.phi_plus) out += parts.c_plus * parts.phi_plus->amplitudes();
    if (parts.phi_minus) out += parts.c_minus * parts.phi_minus->amplitudes();
    return out;
}

VacuumPair build_afv_ising(const IsingModel& model) {
    if (model.transverse_field != 0.0) {
        throw DomainError("build_afv_ising: closed-form vacua need zero transverse field; "
                          "use build_spectral_pair");
    }
    const ManyBodyState up = xi_plus(model);
    const ManyBodyState down = xi_minus(model);
    const double r = 1.0 / std::sqrt(2.0);
    ManyBodyState afv = up.with_amplitudes(r * (up.amplitudes() + down.amplitudes()));
    ParityParts parts = parity_decompose(up, model.parity);
    return VacuumPair{std::move(afv), up, std::move(parts)};
}

VacuumPair build_spectral_pair(const IsingModel& model) {
    if (model.transverse_field == 0.0) return build_afv_ising(model);

    const Mat h = Mat(model.hamiltonian);
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("build_spectral_pair: eigendecomposition failed");
    }
    const RealVec& evals = solver.eigenvalues();
    Mat evecs = solver.eigenvectors();
    const Mat parity = Mat(model.parity);
    const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());

    // Resolve parity inside each degenerate cluster.
    RealVec parity_of(evals.size());
    for (Eigen::Index start = 0; start < evals.size();) {
        Eigen::Index end = start + 1;
        while (end < evals.size() && evals(end) - evals(start) < 1e-9 * scale) ++end;
        const Eigen::Index n = end - start;
        Mat block = evecs.middleCols(start, n);
        Eigen::SelfAdjointEigenSolver<Mat> ps(block.adjoint() * parity * block);
        evecs.middleCols(start, n) = block * ps.eigenvectors();
        parity_of.segment(start, n) = ps.eigenvalues();
        start = end;
    }

    Eigen::Index even = -1;
    Eigen::Index odd = -1;
    for (Eigen::Index i = 0; i < evals.size() && (even < 0 || odd < 0); ++i) {
        if (even < 0 && parity_of(i) > 0.5) even = i;
        if (odd < 0 && parity_of(i) < -0.5) odd = i;
    }
    if (even < 0 || odd < 0) {
        throw DomainError("build_spectral_pair: spectrum lacks an even or odd sector");
    }

    Vec phi0 = evecs.col(even);
    Eigen::Index pivot;
    phi0.cwiseAbs().maxCoeff(&pivot);
    phi0 *= std::polar(1.0, -std::arg(phi0(pivot)));
    Vec phi1 = evecs.col(odd);
    const cplx m01 = phi0.dot(model.magnetization() * phi1);
    if (std::abs(m01) > 0.0) phi1 *= std::polar(1.0, -std::arg(m01));

    const lattice::Lattice& lat = model.lattice;
    ManyBodyState afv = ManyBodyState::normalized(phi0, lat, model.space);
    ManyBodyState odd_state = ManyBodyState::normalized(phi1, lat, model.space);
    ManyBodyState ppv = ManyBodyState::normalized(afv.amplitudes() + odd_state.amplitudes(), lat,
                                                  model.space);
    ParityParts parts = parity_decompose(ppv, model.parity);
    return VacuumPair{std::move(afv), std::move(ppv), std::move(parts)};
}

std::pair<ManyBodyState, ManyBodyState> mean_field_ppv_pair(const IsingModel& model,
                                                            std::optional<double> tilt) {
    double theta = 0.0;
    if (tilt) {
        theta = *tilt;
    } else if (model.coupling != 0.0) {
        const double ratio =
            model.transverse_field / (2.0 * model.coupling * model.lattice.dimension());
        theta = std::asin(std::clamp(ratio, -1.0, 1.0));
    }
    const double up = std::cos(0.5 * theta);
    const double down = std::sin(0.5 * theta);
    const TensorSpace& space = model.space;
    Vec plus(space.dim());
    Vec minus(space.dim());
    for (Eigen::Index i = 0; i < space.dim(); ++i) {
        const std::vector<int> digits = space.digits(i);
        const int n_down = static_cast<int>(std::count(digits.begin(), digits.end(), 1));
        const int n_up = model.lattice.volume() - n_down;
        plus(i) = std::pow(up, n_up) * std::pow(down, n_down);
        minus(i) = std::pow(down, n_up) * std::pow(up, n_down);
    }
    ManyBodyState a = ManyBodyState::normalized(plus, model.lattice, space);
    ManyBodyState b = ManyBodyState::normalized(minus, model.lattice, space);
    return {std::move(a), std::move(b)};
}

}  // namespace ssblab::models
