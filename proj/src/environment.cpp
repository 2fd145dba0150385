// Spatial kernels, g matrices and contact regions.

#include "ssblab/environment.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace ssblab::env {

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::Constant: return "constant";
        case KernelKind::Exponential: return "exponential";
        case KernelKind::Delta: return "delta";
        case KernelKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "constant") return KernelKind::Constant;
    if (name == "exponential") return KernelKind::Exponential;
    if (name == "delta") return KernelKind::Delta;
    if (name == "tabulated") return KernelKind::Tabulated;
    throw DomainError("unknown kernel kind '" + name + "'");
}

SpatialKernel SpatialKernel::constant() { return {KernelKind::Constant, 0.0, {}}; }

SpatialKernel SpatialKernel::exponential(double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
        throw DomainError("exponential kernel: range must be positive and finite");
    }
    return {KernelKind::Exponential, xi, {}};
}

SpatialKernel SpatialKernel::delta() { return {KernelKind::Delta, 1.0, {}}; }

SpatialKernel SpatialKernel::tabulated(std::vector<double> values) {
    if (values.empty()) throw DomainError("tabulated kernel: no values");
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("tabulated kernel: non-finite value");
    }
    return {KernelKind::Tabulated, 0.0, std::move(values)};
}

double SpatialKernel::value(const lattice::Lattice& lattice, int separation_index) const {
    switch (kind) {
        case KernelKind::Constant: return 1.0;
        case KernelKind::Delta: return separation_index == 0 ? 1.0 : 0.0;
        case KernelKind::Exponential:
            return std::exp(-lattice.min_image_distance(separation_index) / range);
        case KernelKind::Tabulated:
            if (static_cast<int>(table.size()) != lattice.volume()) {
                throw DimensionError("tabulated kernel has " + std::to_string(table.size()) +
                                     " values for a lattice of " +
                                     std::to_string(lattice.volume()) + " sites");
            }
            return table[static_cast<std::size_t>(separation_index)];
    }
    return 0.0;
}

RealVec kernel_spectrum(const SpatialKernel& kernel, const lattice::Lattice& lattice) {
    const int n = lattice.volume();
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) f[static_cast<std::size_t>(r)] = kernel.value(lattice, r);
    RealVec spec(n);
    for (int q = 0; q < n; ++q) {
        cplx acc{0.0, 0.0};
        for (int r = 0; r < n; ++r) acc += f[static_cast<std::size_t>(r)] * std::conj(lattice.phase(q, r));
        spec(q) = acc.real();
    }
    return spec;
}

double correlation_volume(const SpatialKernel& kernel, const lattice::Lattice& lattice) {
    const double f0 = kernel.value(lattice, 0);
    if (f0 <= 0.0) throw DomainError("correlation_volume: kernel must have f(0) > 0");
    double total = 0.0;
    for (int r = 0; r < lattice.volume(); ++r) total += kernel.value(lattice, r);
    return total / f0;
}

double EnvCorrelation::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double EnvCorrelation::max_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

bool EnvCorrelation::positive_semidefinite(double rel_tol) const {
    if ((g - g.adjoint()).norm() > 1e-10 * std::max(1.0, g.norm())) return false;
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    return es.eigenvalues().minCoeff() >= -rel_tol * std::max(hi, 1e-300);
}

bool EnvCorrelation::markov_warning(double energy_spread) const {
    return correlation_time > 0.0 && energy_spread > 1.0 / correlation_time;
}

namespace {

std::vector<int> normalise_contact(std::vector<int> contact, const lattice::Lattice& lattice) {
    if (contact.empty()) throw DomainError("contact region must be non-empty");
    std::sort(contact.begin(), contact.end());
    contact.erase(std::unique(contact.begin(), contact.end()), contact.end());
    if (contact.front() < 0 || contact.back() >= lattice.volume()) {
        throw DomainError("contact region contains a site outside the lattice");
    }
    return contact;
}

}  // namespace

double direct_g00(const SpatialKernel& kernel, double weight, const std::vector<int>& contact,
                  const lattice::Lattice& lattice) {
    double total = 0.0;
    for (int x : contact) {
        for (int y : contact) total += kernel.value(lattice, lattice.separation(x, y));
    }
    return weight * total;
}

EnvCorrelation build_g_matrix(const SpatialKernel& kernel, double weight, std::vector<int> contact,
                              const lattice::Lattice& lattice) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw DomainError("build_g_matrix: temporal weight must be finite and non-negative");
    }
    contact = normalise_contact(std::move(contact), lattice);

    const RealVec spec = kernel_spectrum(kernel, lattice);
    const double scale = std::max(spec.cwiseAbs().maxCoeff(), std::abs(kernel.value(lattice, 0)));
    const double worst = spec.minCoeff();
    if (worst < -1e-12 * std::max(scale, 1e-300)) {
        throw PositivityError("build_g_matrix: kernel has negative Fourier component " +
                              std::to_string(worst) + "; g would not be positive semidefinite");
    }

    const int n = lattice.volume();
    const auto c = static_cast<Eigen::Index>(contact.size());
    Mat phases(n, c);
    for (int k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < c; ++j) phases(k, j) = lattice.phase(k, contact[static_cast<std::size_t>(j)]);
    }
    Mat f(c, c);
    for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            f(i, j) = kernel.value(lattice, lattice.separation(contact[static_cast<std::size_t>(i)],
                                                               contact[static_cast<std::size_t>(j)]));
        }
    }
    Mat g = weight * (phases * f * phases.adjoint());
    g = 0.5 * (g + g.adjoint()).eval();

    EnvCorrelation corr{lattice, kernel, weight, std::move(contact), std::move(g), 0.0, 0.0, {}};
    corr.g00 = corr.g(0, 0).real();
    if (!corr.positive_semidefinite()) {
        throw PositivityError("build_g_matrix: assembled g is not positive semidefinite");
    }
    return corr;
}

EnvCorrelation restrict_contact(const EnvCorrelation& corr, std::vector<int> contact) {
    EnvCorrelation out = build_g_matrix(corr.kernel, corr.weight, std::move(contact), corr.lattice);
    out.correlation_time = corr.correlation_time;
    out.channel = corr.channel;
    return out;
}

EnvCorrelation from_matrix(Mat g, const lattice::Lattice& lattice, std::string channel) {
    if (g.rows() != lattice.volume() || g.cols() != lattice.volume()) {
        throw DimensionError("from_matrix: g must be |Lambda| x |Lambda|");
    }
    EnvCorrelation corr{lattice, SpatialKernel::tabulated(std::vector<double>(
                                     static_cast<std::size_t>(lattice.volume()), 0.0)),
                        1.0, all_sites(lattice), std::move(g), 0.0, 0.0, {}};
    corr.g00 = corr.g(0, 0).real();
    corr.channel = std::move(channel);
    return corr;
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::LongRange: return "long-range";
        case Regime::ShortRange: return "short-range";
        case Regime::Degenerate: return "degenerate";
    }
    return "unknown";
}

RegimeReport scaling_regime(const EnvCorrelation& corr) {
    const double c = static_cast<double>(corr.contact.size());
    const double f0 = corr.kernel.value(corr.lattice, 0);
    const double vol = std::max(1.0, correlation_volume(corr.kernel, corr.lattice));
    RegimeReport r{};
    r.contact_volume = c;
    r.correlation_volume = vol;
    r.long_range_estimate = corr.weight * f0 * c * c;
    r.short_range_estimate = corr.weight * f0 * c * std::min(vol, c);
    if (corr.contact.size() == 1) {
        r.regime = Regime::Degenerate;
        r.predicted = r.long_range_estimate;
    } else if (vol > c) {
        r.regime = Regime::LongRange;
        r.predicted = r.long_range_estimate;
    } else {
        r.regime = Regime::ShortRange;
        r.predicted = r.short_range_estimate;
    }
    r.exact = corr.g00;
    r.ratio = r.predicted != 0.0 ? r.exact / r.predicted : std::numeric_limits<double>::quiet_NaN();
    return r;
}

void write_g_csv(std::ostream& out, const EnvCorrelation& corr) {
    out << "k1,k2,re,im\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < corr.g.rows(); ++i) {
        for (Eigen::Index j = 0; j < corr.g.cols(); ++j) {
            out << i << ',' << j << ',' << corr.g(i, j).real() << ',' << corr.g(i, j).imag() << '\n';
        }
    }
}

std::vector<int> leading_sites(int n, const lattice::Lattice& lattice) {
    if (n < 1 || n > lattice.volume()) {
        throw DomainError("leading_sites: size " + std::to_string(n) + " outside 1.." +
                          std::to_string(lattice.volume()));
    }
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
}

std::vector<int> all_sites(const lattice::Lattice& lattice) {
    return leading_sites(lattice.volume(), lattice);
}

void InteractionSpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("InteractionSpec: lambda must be finite and non-negative");
    }
    if (channels.empty()) throw DomainError("InteractionSpec: no interaction channels");
    const Eigen::Index d = channels.front().op.dim();
    for (const Channel& ch : channels) {
        if (ch.op.sites() != ch.corr.lattice.volume()) {
            throw DimensionError("InteractionSpec: channel '" + ch.label +
                                 "' operator family does not cover the lattice");
        }
        if (ch.op.dim() != d) {
            throw DimensionError("InteractionSpec: channels act on different spaces");
        }
        if (ch.corr.g.rows() != ch.corr.lattice.volume()) {
            throw DimensionError("InteractionSpec: channel '" + ch.label + "' g has wrong size");
        }
    }
}

Eigen::Index InteractionSpec::dim() const {
    return channels.empty() ? 0 : channels.front().op.dim();
}

InteractionSpec single_channel(double lambda, const LocalOperatorField& field,
                               const lattice::Lattice& lattice, const TensorSpace& space,
                               EnvCorrelation corr) {
    InteractionSpec spec;
    spec.lambda = lambda;
    spec.channels.push_back(
        Channel{field.label, embed_field(field, lattice, space), field.site_op, std::move(corr)});
    spec.validate();
    return spec;
}

}  // namespace ssblab::env
