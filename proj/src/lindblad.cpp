// Dense RK4 integration of the Markovian master equation.

#include "ssblab/dynamics.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace ssblab::dynamics {

DensityMatrix::DensityMatrix(Mat rho, double time) : rho_(std::move(rho)), t_(time) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
        throw DimensionError("DensityMatrix: matrix must be square and non-empty");
    }
}

DensityMatrix DensityMatrix::pure(const ManyBodyState& state, double time) {
    const Vec& v = state.amplitudes();
    return DensityMatrix(v * v.adjoint(), time);
}

double DensityMatrix::purity() const { return rho_.squaredNorm(); }

double DensityMatrix::hermiticity_error() const { return (rho_ - rho_.adjoint()).norm(); }

double DensityMatrix::min_eigenvalue() const {
    const Mat herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

cplx DensityMatrix::expectation(const SpMat& op) const {
    if (op.rows() != dim()) throw DimensionError("DensityMatrix::expectation: dimension mismatch");
    const Mat a_rho = op * rho_;
    return a_rho.trace();
}

namespace {

double spectral_norm(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace

LindbladGenerator::LindbladGenerator(SpMat hamiltonian, const env::InteractionSpec& interaction)
    : h_(std::move(hamiltonian)) {
    interaction.validate();
    if (interaction.dim() != h_.rows()) {
        throw DimensionError("LindbladGenerator: interaction acts on a different space");
    }
    if (!is_hermitian(h_, 1e-12)) throw DomainError("LindbladGenerator: H is not Hermitian");

    const double lambda2 = interaction.lambda * interaction.lambda;
    double dissipative_scale = 0.0;
    effective_ = h_;
    for (const env::Channel& ch : interaction.channels) {
        if (!ch.corr.positive_semidefinite()) {
            std::ostringstream msg;
            msg << "positivity: g of channel '" << ch.label
                << "' has minimum eigenvalue " << ch.corr.min_eigenvalue();
            throw PositivityError(msg.str());
        }
        const double a_norm = ch.site_op ? spectral_norm(*ch.site_op)
                                         : operator_norm_bound(ch.op.at_site.front());
        dissipative_scale =
            std::max(dissipative_scale, lambda2 * ch.corr.max_eigenvalue() * a_norm * a_norm);
        if (lambda2 == 0.0) continue;

        Eigen::SelfAdjointEigenSolver<Mat> es(ch.corr.g);
        const RealVec& mu = es.eigenvalues();
        const double mu_max = mu.cwiseAbs().maxCoeff();
        if (mu_max == 0.0) continue;

        const lattice::Lattice& lat = ch.corr.lattice;
        std::vector<SpMat> a_k;
        a_k.reserve(static_cast<std::size_t>(lat.volume()));
        for (int k = 0; k < lat.volume(); ++k) a_k.push_back(momentum_transform(ch.op, k, lat));

        for (Eigen::Index j = 0; j < mu.size(); ++j) {
            if (mu(j) <= 1e-14 * mu_max) continue;
            SpMat lj(h_.rows(), h_.cols());
            for (int k = 0; k < lat.volume(); ++k) {
                const cplx c = std::conj(es.eigenvectors()(k, j));
                if (std::abs(c) > 1e-15) lj += c * a_k[static_cast<std::size_t>(k)];
            }
            lj.prune(cplx{0.0, 0.0}, 1e-15);
            const double rate = lambda2 * mu(j);
            const SpMat lj_dag = lj.adjoint();
            effective_ -= (kI * rate) * SpMat(lj_dag * lj);
            jumps_.push_back(Jump{ch.label, rate, lj});
            jumps_dag_.push_back(lj_dag);
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    const double h_norm = operator_norm_bound(h_);
    const double unitary_limit = h_norm > 0.0 ? 1.0 / h_norm : inf;
    const double dissipative_limit = dissipative_scale > 0.0 ? 1.0 / dissipative_scale : inf;
    step_limit_ = 0.1 * std::min(unitary_limit, dissipative_limit);
}

Mat LindbladGenerator::apply(const Mat& rho) const {
    if (rho.rows() != h_.rows()) throw DimensionError("LindbladGenerator: rho dimension mismatch");
    const Mat k_rho = effective_ * rho;
    const Mat rho_kdag = (effective_ * rho.adjoint()).adjoint();
    Mat out = -kI * (k_rho - rho_kdag);
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
        const Mat l_rho = jumps_[j].op * rho;
        const Mat l_rho_ldag = (jumps_[j].op * l_rho.adjoint()).adjoint();
        out += (2.0 * jumps_[j].rate) * l_rho_ldag;
    }
    return out;
}

double LindbladGenerator::linear_entropy_rate(const Mat& rho) const {
    const Mat drho = apply(rho);
    return -2.0 * (rho.cwiseProduct(drho.transpose())).sum().real();
}

StepResult lindblad_step(const DensityMatrix& rho, const LindbladGenerator& generator, double dt) {
    if (!(dt > 0.0)) throw DomainError("lindblad_step: dt must be positive");
    if (dt > generator.step_limit() * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "lindblad_step: dt = " << dt << " exceeds the stability ceiling "
            << generator.step_limit() << "; use at least "
            << static_cast<long long>(std::ceil(dt / generator.step_limit())) << "x more steps";
        throw DomainError(msg.str());
    }
    const Mat& r0 = rho.matrix();
    const Mat k1 = generator.apply(r0);
    const Mat k2 = generator.apply(r0 + (0.5 * dt) * k1);
    const Mat k3 = generator.apply(r0 + (0.5 * dt) * k2);
    const Mat k4 = generator.apply(r0 + dt * k3);
    Mat next = r0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const cplx tr = next.trace();
    const double drift = std::abs(tr - 1.0);
    bool renorm = false;
    if (drift > kTraceRenormaliseThreshold) {
        next /= tr.real();
        renorm = true;
    }
    return StepResult{DensityMatrix(std::move(next), rho.time() + dt), drift, renorm};
}

namespace {

TrajectoryRow make_row(const DensityMatrix& rho, const std::optional<SpMat>& obs, bool with_eig) {
    TrajectoryRow row{};
    row.t = rho.time();
    row.linear_entropy = 1.0 - rho.purity();
    row.trace = rho.trace().real();
    row.min_eigenvalue = with_eig ? rho.min_eigenvalue() : std::numeric_limits<double>::quiet_NaN();
    if (obs) {
        const cplx m = rho.expectation(*obs);
        const SpMat mdm = SpMat(obs->adjoint()) * (*obs);
        row.order_parameter = m;
        row.order_fluctuation = rho.expectation(mdm).real() - std::norm(m);
    } else {
        row.order_parameter = {0.0, 0.0};
        row.order_fluctuation = 0.0;
    }
    return row;
}

}  // namespace

Trajectory propagate(const DensityMatrix& rho0, const LindbladGenerator& generator,
                     double t_final, int n_steps, const PropagateOptions& options) {
    Trajectory traj;
    const int sample_every = std::max(1, options.sample_every);
    const int eig_every = std::max(1, options.eigen_check_every);
    if (t_final == 0.0) {
        traj.rows.push_back(make_row(rho0, options.observable, true));
        traj.min_eigenvalue = traj.rows.back().min_eigenvalue;
        traj.snapshots.push_back(rho0);
        return traj;
    }
    if (!(t_final > 0.0)) throw DomainError("propagate: t_final must be non-negative");
    if (n_steps < 10) throw DomainError("propagate: n_steps must be >= 10");

    const double dt = t_final / n_steps;
    traj.n_steps = n_steps;
    DensityMatrix current = rho0;
    int sampled = 0;
    auto record = [&](const DensityMatrix& rho) {
        const bool with_eig = (sampled % eig_every) == 0;
        TrajectoryRow row = make_row(rho, options.observable, with_eig);
        if (with_eig) {
            traj.min_eigenvalue = std::min(traj.min_eigenvalue, row.min_eigenvalue);
            if (row.min_eigenvalue < -kPositivityAbort) {
                std::ostringstream msg;
                msg << "propagate: rho lost positivity (min eigenvalue " << row.min_eigenvalue
                    << " at t = " << row.t << "); reduce the time step";
                throw PositivityError(msg.str());
            }
        }
        traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, rho.hermiticity_error());
        traj.rows.push_back(row);
        traj.snapshots.push_back(rho);
        ++sampled;
    };
    record(current);
    for (int step = 1; step <= n_steps; ++step) {
        StepResult res = lindblad_step(current, generator, dt);
        traj.max_trace_drift = std::max(traj.max_trace_drift, res.trace_drift);
        if (res.renormalised) ++traj.renormalisations;
        // Pin the clock to the grid to avoid accumulating dt round-off.
        current = DensityMatrix(std::move(res.rho).matrix(), step * dt);
        if (step % sample_every == 0 || step == n_steps) record(current);
    }
    return traj;
}

int minimum_steps(const LindbladGenerator& generator, double t_final) {
    const double limit = generator.step_limit();
    if (!std::isfinite(limit)) return 10;
    return std::max(10, static_cast<int>(std::ceil(t_final / limit * (1.0 - 1e-12))));
}

RichardsonStudy richardson_study(const DensityMatrix& rho0, const LindbladGenerator& generator,
                                 double t_final, int base_steps) {
    PropagateOptions quiet;
    quiet.sample_every = std::numeric_limits<int>::max();
    quiet.eigen_check_every = 1;
    auto final_entropy = [&](int n) {
        const Trajectory tr = propagate(rho0, generator, t_final, n, quiet);
        return tr.rows.back().linear_entropy;
    };
    RichardsonStudy st{};
    st.base_steps = base_steps;
    st.s_coarse = final_entropy(base_steps);
    st.s_mid = final_entropy(2 * base_steps);
    st.s_fine = final_entropy(4 * base_steps);
    const double d1 = st.s_coarse - st.s_mid;
    const double d2 = st.s_mid - st.s_fine;
    const double floor = 1e-13 * std::max(1.0, std::abs(st.s_fine));
    st.resolvable = std::abs(d2) > floor && std::abs(d1) > floor;
    st.ratio = d2 != 0.0 ? d1 / d2 : std::numeric_limits<double>::quiet_NaN();
    st.halving_change = std::abs(d2) / std::max(std::abs(st.s_fine), 1e-300);
    return st;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,S_lin,tr_rho,min_eig_rho,M_re,M_im,dMdag_dM\n";
    out << std::setprecision(15);
    for (const TrajectoryRow& r : traj.rows) {
        out << r.t << ',' << r.linear_entropy << ',' << r.trace << ',' << r.min_eigenvalue << ','
            << r.order_parameter.real() << ',' << r.order_parameter.imag() << ','
            << r.order_fluctuation << '\n';
    }
}

}  // namespace ssblab::dynamics
