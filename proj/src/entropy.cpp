// Linear entropy, first-order entropy production and rate fits.

#include "ssblab/fragility.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace ssblab::fragility {

double linear_entropy(const dynamics::DensityMatrix& rho) { return 1.0 - rho.purity(); }

double correlation_density(const ManyBodyState& phi, const env::InteractionSpec& interaction) {
    const Vec& v = phi.amplitudes();
    const Eigen::Index dim = v.size();
    double total = 0.0;
    for (const env::Channel& ch : interaction.channels) {
        const lattice::Lattice& lat = ch.corr.lattice;
        const int n = lat.volume();
        if (ch.op.dim() != dim) throw DimensionError("correlation_density: channel dimension mismatch");
        // Columns: da(x) phi.
        Mat fluct(dim, n);
        for (int x = 0; x < n; ++x) {
            Vec u = ch.op.at_site[static_cast<std::size_t>(x)] * v;
            const cplx mean = v.dot(u);
            fluct.col(x) = u - mean * v;
        }
        // Columns: da_k phi = |Lambda|^{-1} sum_x e^{ikx} da(x) phi.
        Mat phases(n, n);
        for (int x = 0; x < n; ++x) {
            for (int k = 0; k < n; ++k) phases(x, k) = lat.phase(k, x) / static_cast<double>(n);
        }
        const Mat w = fluct * phases;
        const Mat gram = w.adjoint() * w;
        total += ch.corr.g.cwiseProduct(gram).sum().real();
    }
    return total;
}

namespace {

void check_quadrature(int n_quad) {
    if (n_quad < 8 || n_quad % 2 != 0) {
        throw DomainError("first_order_entropy: n_quad must be even and >= 8, got " +
                          std::to_string(n_quad));
    }
}

// Composite Simpson over samples f[0..m], m even, spacing h.
double simpson(const std::vector<double>& f, std::size_t begin, std::size_t end, std::size_t stride,
               double h) {
    double acc = f[begin] + f[end];
    bool odd = true;
    for (std::size_t i = begin + stride; i < end; i += stride) {
        acc += (odd ? 4.0 : 2.0) * f[i];
        odd = !odd;
    }
    return acc * h / 3.0;
}

}  // namespace

FirstOrderResult first_order_entropy(const ManyBodyState& phi,
                                     const dynamics::UnitaryEvolution& evolution,
                                     const env::InteractionSpec& interaction, double t,
                                     const FirstOrderOptions& options) {
    interaction.validate();
    check_quadrature(options.n_quad);
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("first_order_entropy: t must be >= 0");
    const double lambda2 = interaction.lambda * interaction.lambda;
    const double start = lambda2 * correlation_density(phi, interaction);
    if (t == 0.0) return FirstOrderResult{0.0, options.n_quad, 0.0, start};

    const int fine = 2 * options.n_quad;
    const double h = t / fine;
    std::vector<double> f(static_cast<std::size_t>(fine) + 1);
    f[0] = start;
    double peak = std::abs(start);
    for (int i = 1; i <= fine; ++i) {
        f[static_cast<std::size_t>(i)] =
            lambda2 * correlation_density(evolution.evolve(phi, i * h), interaction);
        peak = std::max(peak, std::abs(f[static_cast<std::size_t>(i)]));
    }
    // Absolute floor: round-off on the scale of the coupling, not of the integrand,
    // so a vanishing integrand does not demand relative accuracy it cannot have.
    double coupling_scale = 0.0;
    for (const env::Channel& ch : interaction.channels) {
        const double a = operator_norm_bound(ch.op.at_site.front());
        coupling_scale += ch.corr.g.cwiseAbs().maxCoeff() * a * a;
    }
    const double floor = 1e-14 * lambda2 * coupling_scale * t;
    const double coarse_value = simpson(f, 0, static_cast<std::size_t>(fine), 2, 2.0 * h);
    const double fine_value = simpson(f, 0, static_cast<std::size_t>(fine), 1, h);
    const double change = std::abs(fine_value - coarse_value);
    if (options.check_convergence &&
        change > options.rel_tol * std::abs(fine_value) + floor + 1e-13 * peak * t) {
        std::ostringstream msg;
        msg << "first_order_entropy: doubling n_quad from " << options.n_quad
            << " changed the result by " << change << " (value " << fine_value << ")";
        throw ConvergenceError(msg.str());
    }
    return FirstOrderResult{fine_value, fine, change, start};
}

std::vector<double> uniform_grid(double horizon, int n_points) {
    if (n_points < 2) throw DomainError("uniform_grid: need at least two points");
    if (!(horizon >= 0.0)) throw DomainError("uniform_grid: horizon must be >= 0");
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) grid[static_cast<std::size_t>(i)] = horizon * i / (n_points - 1);
    return grid;
}

std::vector<double> first_order_series(const ManyBodyState& phi,
                                       const dynamics::UnitaryEvolution& evolution,
                                       const env::InteractionSpec& interaction, double t_max,
                                       int n_points, int substeps) {
    interaction.validate();
    if (substeps < 2 || substeps % 2 != 0) {
        throw DomainError("first_order_series: substeps must be even and >= 2");
    }
    const std::vector<double> times = uniform_grid(t_max, n_points);
    const double lambda2 = interaction.lambda * interaction.lambda;
    const int m = (n_points - 1) * substeps;
    const double h = t_max / m;
    std::vector<double> f(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        const ManyBodyState at = i == 0 ? phi : evolution.evolve(phi, i * h);
        f[static_cast<std::size_t>(i)] = lambda2 * correlation_density(at, interaction);
    }
    std::vector<double> out(times.size(), 0.0);
    for (int p = 1; p < n_points; ++p) {
        const auto b = static_cast<std::size_t>((p - 1) * substeps);
        const auto e = static_cast<std::size_t>(p * substeps);
        out[static_cast<std::size_t>(p)] = out[static_cast<std::size_t>(p - 1)] + simpson(f, b, e, 1, h);
    }
    return out;
}

double theorem1_rate(const ManyBodyState& phi, const env::InteractionSpec& interaction) {
    const double lambda2 = interaction.lambda * interaction.lambda;
    double rate = 0.0;
    for (const env::Channel& ch : interaction.channels) {
        const SpMat intensive = build_intensive(ch.op, ch.corr.lattice);
        rate += ch.corr.g00 * fluctuation(phi, intensive);
    }
    return lambda2 * rate;
}

EntropyReport first_order_report(const ManyBodyState& phi,
                                 const dynamics::UnitaryEvolution& evolution,
                                 const env::InteractionSpec& interaction, double t_max,
                                 int n_points) {
    EntropyReport report;
    report.times = uniform_grid(t_max, n_points);
    report.s_first = first_order_series(phi, evolution, interaction, t_max, n_points);
    report.lambda2 = interaction.lambda * interaction.lambda;
    report.gamma_hat = rate_extract(report).gamma;
    report.bound = theorem1_rate(phi, interaction);
    report.slack = report.gamma_hat - report.bound;
    return report;
}

namespace {

double slope_through_origin(const std::vector<double>& t, const std::vector<double>& s,
                            double window_end, int& used) {
    double num = 0.0;
    double den = 0.0;
    used = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 0.0 || t[i] > window_end) continue;
        num += t[i] * s[i];
        den += t[i] * t[i];
        ++used;
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

RateEstimate rate_extract(const EntropyReport& report) {
    const auto& t = report.times;
    const auto& s = report.s_first;
    if (t.size() != s.size() || t.size() < 2) {
        throw DomainError("rate_extract: need at least two (t, S1) samples");
    }
    RateEstimate est;
    const double t_max = *std::max_element(t.begin(), t.end());
    int used = 0;
    const double bootstrap = slope_through_origin(t, s, t_max, used);
    double window = t_max;
    if (bootstrap > 0.0) {
        const double candidate = 0.1 / bootstrap;
        int in_window = 0;
        for (double ti : t) {
            if (ti > 0.0 && ti <= candidate) ++in_window;
        }
        if (in_window >= 2) window = std::min(t_max, candidate);
    }
    est.window_end = window;
    est.gamma = slope_through_origin(t, s, window, used);
    est.points_used = used;

    double peak = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > window) continue;
        peak = std::max(peak, std::abs(s[i]));
        worst = std::max(worst, std::abs(s[i] - est.gamma * t[i]));
    }
    est.max_relative_deviation = peak > 0.0 ? worst / peak : 0.0;
    est.nonlinear = est.max_relative_deviation > 0.01;
    if (est.nonlinear) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            est.windowed_slopes.push_back((s[i] - s[i - 1]) / (t[i] - t[i - 1]));
        }
    }
    return est;
}

double rate_difference(const EntropyReport& afv, const EntropyReport& ppv) {
    return rate_extract(afv).gamma - rate_extract(ppv).gamma;
}

}  // namespace ssblab::fragility
