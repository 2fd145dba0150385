// Spectral decompositions and closed-system propagation.

#include "ssblab/dynamics.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssblab::dynamics {

SpectralDecomposition SpectralDecomposition::of(const SpMat& hamiltonian, std::string tag) {
    if (hamiltonian.rows() > kDenseLimit) {
        throw DimensionError("SpectralDecomposition: dimension " +
                             std::to_string(hamiltonian.rows()) + " exceeds the dense limit " +
                             std::to_string(kDenseLimit));
    }
    if (!is_hermitian(hamiltonian, 1e-12)) {
        throw DomainError("SpectralDecomposition: Hamiltonian is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Mat> solver{Mat(hamiltonian)};
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("SpectralDecomposition: eigensolver failed");
    }
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors(), std::move(tag)};
}

double SpectralDecomposition::reconstruction_error(const SpMat& hamiltonian) const {
    const Mat h = Mat(hamiltonian);
    const Mat rebuilt = vectors * energies.cast<cplx>().asDiagonal() * vectors.adjoint();
    return (h - rebuilt).norm() / std::max(1e-300, h.norm());
}

double SpectralDecomposition::unitarity_error() const {
    return (vectors.adjoint() * vectors - Mat::Identity(vectors.cols(), vectors.cols())).norm();
}

UnitaryEvolution::UnitaryEvolution(SpMat hamiltonian, std::string tag, std::optional<Method> force)
    : h_(std::move(hamiltonian)) {
    if (h_.rows() != h_.cols()) throw DimensionError("UnitaryEvolution: Hamiltonian not square");
    if (!is_hermitian(h_, 1e-12)) {
        throw DomainError("UnitaryEvolution: Hamiltonian is not Hermitian");
    }
    norm_bound_ = operator_norm_bound(h_);
    if (force) {
        method_ = *force;
    } else if (is_diagonal(h_)) {
        method_ = Method::Diagonal;
    } else if (h_.rows() <= kDenseLimit) {
        method_ = Method::Spectral;
    } else {
        method_ = Method::Krylov;
    }
    if (method_ == Method::Diagonal) {
        if (!is_diagonal(h_)) throw DomainError("UnitaryEvolution: Hamiltonian is not diagonal");
        diag_ = RealVec::Zero(h_.rows());
        for (int c = 0; c < h_.outerSize(); ++c) {
            for (SpMat::InnerIterator it(h_, c); it; ++it) diag_(it.row()) = it.value().real();
        }
    } else if (method_ == Method::Spectral) {
        spectral_ = SpectralDecomposition::of(h_, std::move(tag));
    }
}

Vec UnitaryEvolution::apply(const Vec& v, double t) const {
    if (v.size() != h_.rows()) throw DimensionError("UnitaryEvolution: vector dimension mismatch");
    if (t == 0.0) return v;
    switch (method_) {
        case Method::Diagonal: {
            Vec out(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i) * std::polar(1.0, -diag_(i) * t);
            return out;
        }
        case Method::Spectral: {
            const auto& sd = *spectral_;
            Vec coeffs = sd.vectors.adjoint() * v;
            for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) *= std::polar(1.0, -sd.energies(i) * t);
            return sd.vectors * coeffs;
        }
        case Method::Krylov: return krylov_apply(v, t);
    }
    return v;
}

Vec UnitaryEvolution::krylov_apply(const Vec& v, double t) const {
    const Eigen::Index dim = h_.rows();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(40, dim));
    const double tau_max = 8.0 / std::max(norm_bound_, 1e-300);
    Vec w = v;
    double remaining = std::abs(t);
    const double sign = t < 0 ? -1.0 : 1.0;
    while (remaining > 0.0) {
        const double tau = std::min(remaining, tau_max);
        remaining -= tau;
        const double beta0 = w.norm();
        if (beta0 == 0.0) return w;
        Mat q(dim, m_max);
        RealVec alpha(m_max);
        RealVec beta(m_max);
        q.col(0) = w / beta0;
        int m = m_max;
        for (int j = 0; j < m_max; ++j) {
            Vec r = h_ * q.col(j);
            alpha(j) = q.col(j).dot(r).real();
            // Full reorthogonalisation keeps the small basis orthonormal.
            for (int pass = 0; pass < 2; ++pass) r -= q.leftCols(j + 1) * (q.leftCols(j + 1).adjoint() * r);
            beta(j) = r.norm();
            if (j + 1 == m_max) break;
            if (beta(j) < 1e-12 * std::max(1.0, norm_bound_)) {
                m = j + 1;
                break;
            }
            q.col(j + 1) = r / beta(j);
        }
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            tri(j, j) = alpha(j);
            if (j + 1 < m) {
                tri(j, j + 1) = beta(j);
                tri(j + 1, j) = beta(j);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        Vec y(m);
        for (int i = 0; i < m; ++i) {
            y(i) = es.eigenvectors()(0, i) * std::polar(1.0, -sign * es.eigenvalues()(i) * tau);
        }
        const Vec coeff = es.eigenvectors().cast<cplx>() * y;
        w = beta0 * (q.leftCols(m) * coeff);
    }
    return w;
}

ManyBodyState UnitaryEvolution::evolve(const ManyBodyState& state, double t) const {
    Vec out = apply(state.amplitudes(), t);
    // Propagation is unitary to round-off; restore the exact norm the state type requires.
    out /= out.norm();
    return state.with_amplitudes(std::move(out));
}

double UnitaryEvolution::energy_spread(const ManyBodyState& state) const {
    const Vec hv = h_ * state.amplitudes();
    const double mean = state.amplitudes().dot(hv).real();
    return std::sqrt(std::max(0.0, hv.squaredNorm() - mean * mean));
}

ManyBodyState evolve_state(const ManyBodyState& state, const SpMat& hamiltonian, double t) {
    return UnitaryEvolution(hamiltonian).evolve(state, t);
}

Mat heisenberg_picture(const SpMat& op, const UnitaryEvolution& evolution, double s) {
    const Eigen::Index dim = evolution.dim();
    if (op.rows() != dim || op.cols() != dim) {
        throw DimensionError("heisenberg_picture: operator dimension mismatch");
    }
    if (dim > kDenseLimit) {
        throw DimensionError("heisenberg_picture: dimension exceeds the dense limit");
    }
    switch (evolution.method()) {
        case UnitaryEvolution::Method::Diagonal: {
            const RealVec& e = evolution.diagonal();
            Mat out = Mat::Zero(dim, dim);
            for (int c = 0; c < op.outerSize(); ++c) {
                for (SpMat::InnerIterator it(op, c); it; ++it) {
                    out(it.row(), it.col()) = it.value() * std::polar(1.0, (e(it.row()) - e(it.col())) * s);
                }
            }
            return out;
        }
        case UnitaryEvolution::Method::Spectral: {
            const auto& sd = *evolution.spectral();
            Vec phases(dim);
            for (Eigen::Index i = 0; i < dim; ++i) phases(i) = std::polar(1.0, -sd.energies(i) * s);
            const Mat u = sd.vectors * phases.asDiagonal() * sd.vectors.adjoint();
            return u.adjoint() * (op * u);
        }
        case UnitaryEvolution::Method::Krylov: {
            Mat u(dim, dim);
            for (Eigen::Index j = 0; j < dim; ++j) u.col(j) = evolution.apply(Vec::Unit(dim, j), s);
            return u.adjoint() * (op * u);
        }
    }
    return Mat(op);
}

Mat heisenberg_picture(const SpMat& op, const SpMat& hamiltonian, double s) {
    return heisenberg_picture(op, UnitaryEvolution(hamiltonian), s);
}

}  // namespace ssblab::dynamics
