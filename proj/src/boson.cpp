// Free bosons in momentum-mode Fock space.

#include "ssblab/models.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssblab::models {

FreeBosonModel build_free_boson(int linear_size, int dimension, int n_max, int n_max_excited,
                                double hopping) {
    if (n_max < 1) throw DomainError("build_free_boson: n_max must be >= 1");
    if (n_max_excited < 0) n_max_excited = n_max;
    if (n_max_excited < 1) throw DomainError("build_free_boson: excited-mode cutoff must be >= 1");
    const lattice::Lattice lat(dimension, linear_size);

    std::vector<int> cutoffs(static_cast<std::size_t>(lat.volume()), n_max_excited);
    cutoffs[0] = n_max;
    std::vector<int> dims(cutoffs.size());
    for (std::size_t k = 0; k < cutoffs.size(); ++k) dims[k] = cutoffs[k] + 1;
    TensorSpace space(dims);

    RealVec eps(lat.volume());
    for (int k = 0; k < lat.volume(); ++k) {
        double e = 0.0;
        for (double km : lat.momentum(k)) e += 1.0 - std::cos(km);
        eps(k) = 2.0 * hopping * e;
    }

    std::vector<SpMat> modes;
    modes.reserve(cutoffs.size());
    for (int k = 0; k < lat.volume(); ++k) {
        modes.push_back(embed_local(ops::annihilation(cutoffs[static_cast<std::size_t>(k)]), k, space));
    }

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(space.dim()));
    for (Eigen::Index i = 0; i < space.dim(); ++i) {
        double e = 0.0;
        for (int k = 0; k < lat.volume(); ++k) e += eps(k) * space.digit(i, k);
        trips.emplace_back(i, i, e);
    }
    SpMat h(space.dim(), space.dim());
    h.setFromTriplets(trips.begin(), trips.end());

    return FreeBosonModel{lat, hopping, std::move(eps), std::move(cutoffs), std::move(space),
                          std::move(h), std::move(modes)};
}

SiteOperators FreeBosonModel::psi() const {
    SiteOperators out;
    out.label = "psi";
    const double norm = 1.0 / std::sqrt(static_cast<double>(lattice.volume()));
    for (int x = 0; x < lattice.volume(); ++x) {
        SpMat op(space.dim(), space.dim());
        for (int k = 0; k < lattice.volume(); ++k) {
            op += (lattice.phase(k, x) * norm) * modes[static_cast<std::size_t>(k)];
        }
        out.at_site.push_back(std::move(op));
    }
    return out;
}

SiteOperators FreeBosonModel::psi_dag() const {
    SiteOperators out = psi().adjoint();
    out.label = "psi_dag";
    return out;
}

SpMat FreeBosonModel::order_parameter() const {
    return (1.0 / std::sqrt(static_cast<double>(lattice.volume()))) * modes.front();
}

SpMat FreeBosonModel::number(int k_index) const {
    const SpMat& c = modes.at(static_cast<std::size_t>(k_index));
    return SpMat(c.adjoint()) * c;
}

double top_level_weight(const ManyBodyState& state, const std::vector<int>& cutoffs) {
    const TensorSpace& space = state.space();
    if (static_cast<int>(cutoffs.size()) != space.factors()) {
        throw DimensionError("top_level_weight: cutoff list does not match the mode count");
    }
    std::vector<double> weight(cutoffs.size(), 0.0);
    const Vec& amps = state.amplitudes();
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps(i));
        if (p == 0.0) continue;
        for (std::size_t k = 0; k < cutoffs.size(); ++k) {
            if (space.digit(i, static_cast<int>(k)) == cutoffs[k]) weight[k] += p;
        }
    }
    double worst = 0.0;
    for (double w : weight) worst = std::max(worst, w);
    return worst;
}

BosonStates build_boson_states(const FreeBosonModel& model, int particles, cplx alpha) {
    const int n_max = model.cutoffs.front();
    if (particles < 0 || particles > n_max) {
        throw DomainError("build_boson_states: N = " + std::to_string(particles) +
                          " outside the k = 0 cutoff " + std::to_string(n_max));
    }
    const double a = std::abs(alpha);
    if (a * a + 6.0 * a > n_max) {
        throw DomainError("build_boson_states: |alpha|^2 + 6|alpha| = " +
                          std::to_string(a * a + 6.0 * a) + " exceeds the k = 0 cutoff " +
                          std::to_string(n_max));
    }
    const Eigen::Index stride = model.space.stride(0);
    const Eigen::Index dim = model.space.dim();

    Vec number = Vec::Zero(dim);
    number(particles * stride) = 1.0;

    Vec coherent = Vec::Zero(dim);
    cplx amp = std::exp(-0.5 * a * a);
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) amp *= alpha / std::sqrt(static_cast<double>(n));
        coherent(n * stride) = amp;
    }

    ManyBodyState num(std::move(number), model.lattice, model.space, Basis::Mode);
    ManyBodyState coh =
        ManyBodyState::normalized(std::move(coherent), model.lattice, model.space, Basis::Mode);
    const double wn = top_level_weight(num, model.cutoffs);
    const double wc = top_level_weight(coh, model.cutoffs);
    return BosonStates{std::move(num), std::move(coh), wn, wc, wn <= kTruncationWeightLimit,
                       wc <= kTruncationWeightLimit};
}

}  // namespace ssblab::models
