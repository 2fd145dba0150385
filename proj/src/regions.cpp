// Epsilon-correlation regions and the intensive fluctuation bound.

#include "ssblab/fragility.hpp"

#include "ssblab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ssblab::fragility {

bool CorrelationRegion::contains(int site) const {
    return std::find(members.begin(), members.end(), site) != members.end();
}

namespace {

// Orthonormal basis (columns) of span{dB_i(x) phi} over the traceless one-site
// operators B_i. Empty when every fluctuation at x vanishes.
Mat whitened_fluctuations(const ManyBodyState& phi, int x, const std::vector<Mat>& basis) {
    const Vec& v = phi.amplitudes();
    Mat u(v.size(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        Vec w = embed_local(basis[i], x, phi.space()) * v;
        const cplx mean = v.dot(w);
        u.col(static_cast<Eigen::Index>(i)) = w - mean * v;
    }
    const Mat gram = u.adjoint() * u;
    Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
    const RealVec& ev = eig.eigenvalues();
    const double top = ev.size() ? ev(ev.size() - 1) : 0.0;
    if (top <= 1e-14) return Mat(v.size(), 0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > 1e-12 * top) keep.push_back(i);
    }
    Mat q(v.size(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        q.col(static_cast<Eigen::Index>(j)) = u * eig.eigenvectors().col(keep[j]) / std::sqrt(ev(keep[j]));
    }
    return q;
}

double top_singular(const Mat& qx, const Mat& qy) {
    if (qx.cols() == 0 || qy.cols() == 0) return 0.0;
    const Mat c = qx.adjoint() * qy;
    Eigen::JacobiSVD<Mat> svd(c);
    return svd.singularValues()(0);
}

void require_site_basis(const ManyBodyState& phi) {
    if (phi.basis() != Basis::Site) {
        throw DomainError("correlation region: site-basis state required");
    }
}

struct Scan {
    std::vector<double> sup;
    std::vector<bool> ever_fluctuates;
};

Scan scan(const StateTrajectory& trajectory, int reference, const std::vector<double>& grid) {
    const ManyBodyState& phi0 = trajectory.initial;
    const int n = phi0.lattice().volume();
    Scan out{std::vector<double>(static_cast<std::size_t>(n), 0.0),
             std::vector<bool>(static_cast<std::size_t>(n), false)};
    for (double t : grid) {
        const ManyBodyState phi = t == 0.0 ? phi0 : trajectory.at(t);
        std::vector<Mat> q(static_cast<std::size_t>(n));
        for (int x = 0; x < n; ++x) {
            const auto basis = ops::gell_mann_basis(phi.space().local_dim(x));
            q[static_cast<std::size_t>(x)] = whitened_fluctuations(phi, x, basis);
            if (q[static_cast<std::size_t>(x)].cols() > 0) out.ever_fluctuates[static_cast<std::size_t>(x)] = true;
        }
        const Mat& qy = q[static_cast<std::size_t>(reference)];
        for (int x = 0; x < n; ++x) {
            auto& s = out.sup[static_cast<std::size_t>(x)];
            s = std::max(s, top_singular(q[static_cast<std::size_t>(x)], qy));
        }
    }
    return out;
}

}  // namespace

double canonical_correlation(const ManyBodyState& phi, int x, int y) {
    require_site_basis(phi);
    const Mat qx = whitened_fluctuations(phi, x, ops::gell_mann_basis(phi.space().local_dim(x)));
    const Mat qy = whitened_fluctuations(phi, y, ops::gell_mann_basis(phi.space().local_dim(y)));
    return top_singular(qx, qy);
}

CorrelationRegion correlation_region(const StateTrajectory& trajectory, int reference,
                                     double epsilon, double horizon, int n_grid) {
    const ManyBodyState& phi = trajectory.initial;
    require_site_basis(phi);
    const int n = phi.lattice().volume();
    if (reference < 0 || reference >= n) throw DomainError("correlation region: reference site off lattice");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("correlation region: epsilon must lie in (0, 1]");
    if (!(horizon >= 0.0)) throw DomainError("correlation region: horizon must be >= 0");
    if (n_grid < 2) throw DomainError("correlation region: n_grid must be >= 2");

    auto members_of = [&](const Scan& s) {
        std::vector<int> m;
        for (int x = 0; x < n; ++x) {
            if (s.sup[static_cast<std::size_t>(x)] >= epsilon - kRegionTolerance) m.push_back(x);
        }
        return m;
    };

    const std::vector<double> coarse_grid = uniform_grid(horizon, n_grid);
    const std::vector<double> fine_grid = uniform_grid(horizon, 2 * n_grid - 1);
    const Scan coarse = scan(trajectory, reference, coarse_grid);
    // The refined grid contains the coarse one, so only the new points are scanned.
    std::vector<double> extra;
    for (std::size_t i = 1; i < fine_grid.size(); i += 2) extra.push_back(fine_grid[i]);
    Scan fine = coarse;
    if (!extra.empty()) {
        const Scan more = scan(trajectory, reference, extra);
        for (int x = 0; x < n; ++x) {
            const auto i = static_cast<std::size_t>(x);
            fine.sup[i] = std::max(fine.sup[i], more.sup[i]);
            fine.ever_fluctuates[i] = fine.ever_fluctuates[i] || more.ever_fluctuates[i];
        }
    }
    const std::vector<int> m_coarse = members_of(coarse);
    const std::vector<int> m_fine = members_of(fine);
    if (m_coarse != m_fine) {
        throw ConvergenceError("correlation region: membership changed when the time grid was refined from " +
                               std::to_string(n_grid) + " points");
    }

    CorrelationRegion region;
    region.reference = reference;
    region.horizon = horizon;
    region.epsilon = epsilon;
    region.members = m_fine;
    region.max_correlation = fine.sup;
    region.grid = fine_grid;
    region.local_dim = phi.space().local_dim(0);
    for (int x = 0; x < n; ++x) {
        if (!fine.ever_fluctuates[static_cast<std::size_t>(x)]) region.zero_fluctuation.push_back(x);
    }
    return region;
}

FluctuationBoundReport intensive_fluctuation_bound(const StateTrajectory& trajectory,
                                                   const LocalOperatorField& field,
                                                   const CorrelationRegion& region) {
    const ManyBodyState& phi0 = trajectory.initial;
    const lattice::Lattice& lat = phi0.lattice();
    const SpMat intensive = build_intensive(field, lat, phi0.space());
    const SpMat local = embed_local(field.site_op, region.reference, phi0.space());

    FluctuationBoundReport rep;
    rep.volume_fraction = static_cast<double>(region.volume()) / lat.volume();
    rep.clustering = region.volume() < lat.volume();
    rep.times = region.grid.empty() ? std::vector<double>{0.0} : region.grid;
    rep.min_slack = INFINITY;
    for (double t : rep.times) {
        const ManyBodyState phi = t == 0.0 ? phi0 : trajectory.at(t);
        const double lhs = fluctuation(phi, intensive);
        const double rhs = (rep.volume_fraction + region.epsilon) * fluctuation(phi, local);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.min_slack = std::min(rep.min_slack, rhs - lhs);
    }
    rep.holds = rep.min_slack >= -kRegionTolerance;
    return rep;
}

}  // namespace ssblab::fragility
