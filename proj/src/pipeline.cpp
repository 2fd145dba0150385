// One experiment point: model, environment, entropy, certificates.

#include "ssblab/experiments.hpp"

#include "ssblab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

namespace ssblab::experiments {

using nlohmann::json;

std::vector<PointSpec> expand_points(const ExperimentConfig& config) {
    const auto& s = config.sweep;
    const std::vector<int> Ls = s.L.empty() ? std::vector<int>{config.model.L} : s.L;
    const std::vector<int> contacts =
        s.contact_size.empty() ? std::vector<int>{config.environment.contact_size} : s.contact_size;
    const std::vector<double> lambdas = s.lambda.empty() ? std::vector<double>{config.drive.lambda} : s.lambda;
    const std::vector<double> xis = s.xi.empty() ? std::vector<double>{config.environment.xi} : s.xi;
    std::vector<PointSpec> out;
    for (int L : Ls)
        for (int c : contacts)
            for (double lam : lambdas)
                for (double xi : xis) out.push_back(PointSpec{L, c, lam, xi});
    return out;
}

namespace {

env::SpatialKernel make_kernel(const EnvironmentBlock& e, double xi) {
    switch (e.kernel) {
        case env::KernelKind::Constant: return env::SpatialKernel::constant();
        case env::KernelKind::Exponential: return env::SpatialKernel::exponential(xi);
        case env::KernelKind::Delta: return env::SpatialKernel::delta();
        case env::KernelKind::Tabulated: return env::SpatialKernel::tabulated(e.table);
    }
    return env::SpatialKernel::delta();
}

std::vector<int> make_contact(const EnvironmentBlock& e, int contact_size, const lattice::Lattice& lat) {
    if (!e.contact_sites.empty()) return e.contact_sites;
    if (contact_size <= 0) return env::all_sites(lat);
    if (contact_size > lat.volume()) {
        throw DomainError("environment.contact_size " + std::to_string(contact_size) +
                          " exceeds the lattice volume " + std::to_string(lat.volume()));
    }
    return env::leading_sites(contact_size, lat);
}

fragility::FirstOrderOptions quadrature(const ExperimentConfig& cfg) {
    fragility::FirstOrderOptions q;
    q.n_quad = cfg.drive.n_quad;
    return q;
}

double safe_ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                      : std::numeric_limits<double>::infinity();
    return num / den;
}

LindbladSummary lindblad_run(const ExperimentConfig& cfg, const SpMat& hamiltonian,
                             const env::InteractionSpec& inter, const ManyBodyState& phi,
                             const SpMat& order, const fragility::EntropyReport& report) {
    const dynamics::LindbladGenerator gen(hamiltonian, inter);
    const double t = cfg.drive.t_final;
    const int n = std::max(cfg.drive.n_steps, dynamics::minimum_steps(gen, t));
    dynamics::PropagateOptions opts;
    opts.observable = order;
    opts.sample_every = std::max(1, n / 100);
    const auto rho0 = dynamics::DensityMatrix::pure(phi);

    LindbladSummary s;
    s.trajectory = dynamics::propagate(rho0, gen, t, n, opts);
    s.n_steps = n;
    s.s_lin = s.trajectory.rows.back().linear_entropy;
    s.s_first = report.s_first.back();
    s.max_trace_drift = s.trajectory.max_trace_drift;
    s.min_eigenvalue = s.trajectory.min_eigenvalue;
    const double first_rate = report.lambda2 * fragility::correlation_density(phi, inter);
    s.convention_ratio = first_rate > 0.0 ? gen.linear_entropy_rate(rho0.matrix()) / first_rate : 0.0;
    return s;
}

void theorem1_random_trials(const ExperimentConfig& cfg, const models::IsingModel& model,
                            double lambda, PointResult& out) {
    std::mt19937_64 rng(cfg.seed);
    const auto& lat = model.lattice;
    const dynamics::UnitaryEvolution evo(model.hamiltonian, "random-trials");
    int failures = 0;
    int unmet = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < cfg.drive.random_trials; ++trial) {
        const ManyBodyState phi = random_invariant_state(model, rng);
        const auto kernel = random_psd_kernel(lat, rng);
        const auto corr = env::build_g_matrix(kernel, 1.0, random_contact(lat, rng), lat);
        const LocalOperatorField a(random_site_operator(2, rng), "a");
        const auto inter = env::single_channel(lambda, a, lat, model.space, corr);
        const auto cert = fragility::theorem1_certificate(phi, evo, inter, cfg.drive.t_final, quadrature(cfg));
        if (!cert.preconditions_met) {
            ++unmet;
            continue;
        }
        worst = std::min(worst, cert.slack);
        if (!cert.passed) ++failures;
    }
    fragility::Certificate summary;
    summary.name = "theorem1[random]";
    summary.tolerance = fragility::kCertificateTolerance;
    summary.time = cfg.drive.t_final;
    summary.lambda2 = lambda * lambda;
    summary.slack = std::isfinite(worst) ? worst : 0.0;
    summary.preconditions_met = unmet < cfg.drive.random_trials;
    summary.passed = summary.preconditions_met && failures == 0;
    summary.notes.push_back(std::to_string(cfg.drive.random_trials) + " draws, " +
                            std::to_string(unmet) + " with preconditions unmet, " +
                            std::to_string(failures) + " failures");
    out.certificates.push_back(std::move(summary));
}

PointResult ising_point(const ExperimentConfig& cfg, const PointSpec& spec, Depth depth) {
    const auto& m = cfg.model;
    const models::IsingModel model = models::build_ising(spec.L, m.d, m.J, m.h);
    const models::VacuumPair pair =
        m.h == 0.0 ? models::build_afv_ising(model) : models::build_spectral_pair(model);
    const dynamics::UnitaryEvolution evo(model.hamiltonian, "ising");
    const auto& lat = model.lattice;

    auto corr = env::build_g_matrix(make_kernel(cfg.environment, spec.xi), cfg.environment.gbar,
                                    make_contact(cfg.environment, spec.contact_size, lat), lat);
    corr.correlation_time = cfg.environment.correlation_time;
    const auto inter = env::single_channel(spec.lambda, model.order_field(), lat, model.space, corr);
    const SpMat order = model.magnetization();

    PointResult out;
    out.spec = spec;
    out.volume = lat.volume();
    out.contact_volume = static_cast<int>(corr.contact.size());
    out.g00 = corr.g00;
    out.g_min_eigenvalue = corr.min_eigenvalue();
    out.fluct_afv = fluctuation(pair.afv, order);
    out.fluct_ppv = fluctuation(pair.ppv, order);

    const double t = cfg.drive.t_final;
    const auto rep_afv = fragility::first_order_report(pair.afv, evo, inter, t, cfg.drive.report_points);
    const auto rep_ppv = fragility::first_order_report(pair.ppv, evo, inter, t, cfg.drive.report_points);
    out.gamma_afv = rep_afv.gamma_hat;
    out.gamma_ppv = rep_ppv.gamma_hat;
    out.ratio = safe_ratio(out.gamma_afv, out.gamma_ppv);
    out.delta_gamma = fragility::rate_difference(rep_afv, rep_ppv);
    out.s1_afv = rep_afv.s_first.back();
    out.s1_ppv = rep_ppv.s_first.back();

    auto c1 = fragility::theorem1_certificate(pair.afv, evo, inter, t, quadrature(cfg));
    c1.name = "theorem1[afv]";
    auto c2 = fragility::theorem1_certificate(pair.ppv, evo, inter, t, quadrature(cfg));
    c2.name = "theorem1[ppv]";
    out.certificates.push_back(std::move(c1));
    out.certificates.push_back(std::move(c2));

    if (pair.ppv_parity.phi_plus && pair.ppv_parity.phi_minus) {
        fragility::Theorem2Options o;
        o.quadrature = quadrature(cfg);
        o.horizon_points = cfg.drive.grid_points;
        out.theorem2 = fragility::theorem2_certificate(pair, evo, inter, model.order_field(), t,
                                                       std::max(cfg.drive.horizon, t), o);
    }

    if (cfg.drive.lindblad) {
        out.lindblad = lindblad_run(cfg, model.hamiltonian, inter, pair.afv, order, rep_afv);
    }

    if (depth == Depth::Verify) {
        const fragility::StateTrajectory ta{pair.afv, evo};
        const fragility::StateTrajectory tp{pair.ppv, evo};
        const double T = cfg.drive.horizon;
        const auto ra = fragility::correlation_region(ta, 0, cfg.drive.epsilon, T, cfg.drive.grid_points);
        const auto rp = fragility::correlation_region(tp, 0, cfg.drive.epsilon, T, cfg.drive.grid_points);
        const auto ba = fragility::intensive_fluctuation_bound(ta, model.order_field(), ra);
        const auto bp = fragility::intensive_fluctuation_bound(tp, model.order_field(), rp);
        out.regions = RegionSummary{ra.volume(), rp.volume(), bp.holds, ba.holds, ba.min_slack, bp.min_slack};
        out.ppv_clustering = bp.clustering;
        if (cfg.drive.random_trials > 0) theorem1_random_trials(cfg, model, std::max(spec.lambda, 0.0), out);
    }
    out.environment = std::move(corr);
    return out;
}

PointResult boson_point(const ExperimentConfig& cfg, const PointSpec& spec, Depth depth) {
    const auto& m = cfg.model;
    const lattice::Lattice probe(m.d, spec.L);
    const int particles = m.density ? static_cast<int>(std::lround(*m.density * probe.volume())) : m.particles;
    int n_max = m.n_max;
    if (m.density) n_max = std::max(n_max, particles + 1);
    if (particles + 1 > n_max) {
        throw DomainError("model.particles: N + 1 = " + std::to_string(particles + 1) +
                          " exceeds n_max = " + std::to_string(n_max) +
                          "; the creation channel needs one spare level");
    }
    const models::FreeBosonModel model = models::build_free_boson(spec.L, m.d, n_max, m.n_max_excited, m.hopping);
    const models::BosonStates states = models::build_boson_states(model, particles, cplx{m.alpha, 0.0});
    const dynamics::UnitaryEvolution evo(model.hamiltonian, "free-boson");
    const auto& lat = model.lattice;

    auto corr = env::build_g_matrix(make_kernel(cfg.environment, spec.xi), cfg.environment.gbar,
                                    make_contact(cfg.environment, spec.contact_size, lat), lat);
    corr.correlation_time = cfg.environment.correlation_time;
    env::EnvCorrelation plus = corr;
    plus.channel = "+";
    env::EnvCorrelation minus = corr;
    minus.channel = "-";
    env::InteractionSpec inter;
    inter.lambda = spec.lambda;
    inter.channels.push_back(env::Channel{"psi", model.psi(), std::nullopt, plus});
    inter.channels.push_back(env::Channel{"psi_dag", model.psi_dag(), std::nullopt, minus});
    inter.validate();
    const SpMat order = model.order_parameter();

    PointResult out;
    out.spec = spec;
    out.volume = lat.volume();
    out.contact_volume = static_cast<int>(corr.contact.size());
    out.g00 = corr.g00;
    out.g_min_eigenvalue = corr.min_eigenvalue();
    out.fluct_afv = fluctuation(states.number, order);
    out.fluct_ppv = fluctuation(states.coherent, order);

    const double t = cfg.drive.t_final;
    const auto rep_n = fragility::first_order_report(states.number, evo, inter, t, cfg.drive.report_points);
    const auto rep_c = fragility::first_order_report(states.coherent, evo, inter, t, cfg.drive.report_points);
    out.gamma_afv = rep_n.gamma_hat;
    out.gamma_ppv = rep_c.gamma_hat;
    out.ratio = safe_ratio(out.gamma_afv, out.gamma_ppv);
    out.delta_gamma = fragility::rate_difference(rep_n, rep_c);
    out.s1_afv = rep_n.s_first.back();
    out.s1_ppv = rep_c.s_first.back();

    auto c1 = fragility::theorem1_certificate(states.number, evo, inter, t, quadrature(cfg));
    c1.name = "theorem1[number]";
    auto c2 = fragility::theorem1_certificate(states.coherent, evo, inter, t, quadrature(cfg));
    c2.name = "theorem1[coherent]";
    out.certificates.push_back(std::move(c1));
    out.certificates.push_back(std::move(c2));

    if (!states.number_reliable || !states.coherent_reliable) {
        out.status = "truncation";
    }
    if (cfg.drive.lindblad) {
        out.lindblad = lindblad_run(cfg, model.hamiltonian, inter, states.number, order, rep_n);
    }
    (void)depth;  // regions need a site basis; the boson model lives in mode space
    out.environment = std::move(corr);
    return out;
}

}  // namespace

PointResult run_point(const ExperimentConfig& config, const PointSpec& spec, Depth depth) {
    return config.model.kind == ModelKind::Ising ? ising_point(config, spec, depth)
                                                 : boson_point(config, spec, depth);
}

std::vector<PointResult> run_points(const ExperimentConfig& config, const std::vector<PointSpec>& points,
                                    Depth depth, int threads,
                                    std::vector<std::optional<PointResult>>* done) {
    std::vector<std::optional<PointResult>> slots(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                slots[i] = run_point(config, points[i], depth);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::clamp(threads, 1, std::max(1, static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    if (done) *done = slots;
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<PointResult> out;
    out.reserve(points.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_points_csv(std::ostream& out, const std::vector<PointResult>& rows) {
    out << "L,volume,contact,xi,lambda,g00,gamma_afv,gamma_ppv,ratio,delta_gamma,fluct_afv,fluct_ppv,"
           "s1_afv,s1_ppv,status\n";
    for (const auto& r : rows) {
        out << r.spec.L << ',' << r.volume << ',' << r.contact_volume << ',' << format_number(r.spec.xi)
            << ',' << format_number(r.spec.lambda) << ',' << format_number(r.g00) << ','
            << format_number(r.gamma_afv) << ',' << format_number(r.gamma_ppv) << ','
            << format_number(r.ratio) << ',' << format_number(r.delta_gamma) << ','
            << format_number(r.fluct_afv) << ',' << format_number(r.fluct_ppv) << ','
            << format_number(r.s1_afv) << ',' << format_number(r.s1_ppv) << ',' << r.status << '\n';
    }
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json certificate_json(const fragility::Certificate& cert, const std::string& inputs_hash) {
    json j;
    j["name"] = cert.name;
    j["inputs_hash"] = inputs_hash;
    j["lhs"] = finite_or_null(cert.lhs);
    j["rhs"] = finite_or_null(cert.rhs);
    j["slack"] = finite_or_null(cert.slack);
    j["tolerance"] = cert.tolerance;
    j["preconditions_met"] = cert.preconditions_met;
    j["status"] = !cert.preconditions_met ? "preconditions unmet" : (cert.passed ? "pass" : "fail");
    j["notes"] = cert.notes;
    j["grid"] = {{"t", cert.time}, {"points", cert.grid_points}, {"lambda2", cert.lambda2}};
    return j;
}

json point_json(const PointResult& p, const std::string& inputs_hash) {
    json j;
    j["L"] = p.spec.L;
    j["volume"] = p.volume;
    j["contact"] = p.contact_volume;
    j["xi"] = p.spec.xi;
    j["lambda"] = p.spec.lambda;
    j["g00"] = p.g00;
    j["g_min_eigenvalue"] = p.g_min_eigenvalue;
    j["gamma_afv"] = finite_or_null(p.gamma_afv);
    j["gamma_ppv"] = finite_or_null(p.gamma_ppv);
    j["ratio"] = finite_or_null(p.ratio);
    j["delta_gamma"] = finite_or_null(p.delta_gamma);
    j["fluct_afv"] = p.fluct_afv;
    j["fluct_ppv"] = p.fluct_ppv;
    j["s1_afv"] = p.s1_afv;
    j["s1_ppv"] = p.s1_ppv;
    j["status"] = p.status;
    json certs = json::array();
    for (const auto& c : p.certificates) certs.push_back(certificate_json(c, inputs_hash));
    if (p.theorem2) {
        json t2 = certificate_json(p.theorem2->base, inputs_hash);
        t2["nu"] = p.theorem2->nu;
        t2["afv_fluctuation"] = p.theorem2->afv_fluctuation;
        t2["mixture_defect"] = p.theorem2->mixture_defect;
        t2["nu_defect"] = p.theorem2->nu_defect;
        t2["epsilon_hat"] = p.theorem2->epsilon_hat;
        t2["horizon"] = p.theorem2->horizon;
        certs.push_back(std::move(t2));
    }
    j["certificates"] = std::move(certs);
    if (p.lindblad) {
        j["lindblad"] = {{"s_lin", p.lindblad->s_lin},
                         {"s_first", p.lindblad->s_first},
                         {"convention_ratio", p.lindblad->convention_ratio},
                         {"max_trace_drift", p.lindblad->max_trace_drift},
                         {"min_eigenvalue", p.lindblad->min_eigenvalue},
                         {"n_steps", p.lindblad->n_steps}};
    }
    if (p.regions) {
        j["regions"] = {{"afv_volume", p.regions->afv_volume},
                        {"ppv_volume", p.regions->ppv_volume},
                        {"afv_bound_min_slack", p.regions->afv_bound_min_slack},
                        {"ppv_bound_min_slack", p.regions->ppv_bound_min_slack},
                        {"ppv_bound_holds", p.regions->ppv_bound_holds}};
    }
    return j;
}

FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    FitResult f;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    std::vector<double> distinct = lx;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    f.points = static_cast<int>(lx.size());
    if (distinct.size() < 3) {
        f.note = "fit refused: fewer than 3 distinct positive points";
        return f;
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    f.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.exponent * sx) / n;
    f.fitted = true;
    return f;
}

json sweep_summary(const ExperimentConfig& config, const std::vector<PointResult>& rows) {
    json s;
    s["config_hash"] = config_hash(config);
    s["points"] = rows.size();
    auto column = [&](auto get) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(get(r));
        return v;
    };
    const auto contact = column([](const PointResult& r) { return double(r.contact_volume); });
    const auto volume = column([](const PointResult& r) { return double(r.volume); });
    const auto lambda = column([](const PointResult& r) { return r.spec.lambda; });
    const auto xi = column([](const PointResult& r) { return r.spec.xi; });
    const auto g00 = column([](const PointResult& r) { return r.g00; });
    const auto gamma = column([](const PointResult& r) { return r.gamma_afv; });
    const auto ratio = column([](const PointResult& r) { return r.ratio; });

    auto fit_json = [](const FitResult& f) {
        json j{{"fitted", f.fitted}, {"points", f.points}};
        if (f.fitted) {
            j["exponent"] = f.exponent;
            j["intercept"] = f.intercept;
        } else {
            j["note"] = f.note;
        }
        return j;
    };
    json fits;
    if (rows.size() < 3) {
        s["note"] = "fewer than 3 sweep points: no fits";
    } else {
        fits["g00_vs_contact"] = fit_json(loglog_fit(contact, g00));
        fits["gamma_afv_vs_contact"] = fit_json(loglog_fit(contact, gamma));
        fits["gamma_afv_vs_lambda"] = fit_json(loglog_fit(lambda, gamma));
        fits["ratio_vs_volume"] = fit_json(loglog_fit(volume, ratio));
        fits["g00_vs_xi"] = fit_json(loglog_fit(xi, g00));
    }
    s["fits"] = fits;
    return s;
}

ManyBodyState random_invariant_state(const models::IsingModel& model, std::mt19937_64& rng) {
    const TensorSpace& space = model.space;
    if (space.dim() > dynamics::kDenseLimit) {
        throw DomainError("random_invariant_state: dimension above the dense limit");
    }
    const lattice::Lattice& lat = model.lattice;
    Eigen::SelfAdjointEigenSolver<Mat> eig{Mat(model.hamiltonian)};
    const RealVec& e = eig.eigenvalues();
    const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
    // Eigenvalue clusters [begin, end).
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
    for (Eigen::Index i = 0; i < e.size();) {
        Eigen::Index j = i + 1;
        while (j < e.size() && e(j) - e(j - 1) <= 1e-9 * scale) ++j;
        clusters.emplace_back(i, j);
        i = j;
    }
    std::vector<SpMat> shifts;
    for (int s = 0; s < lat.volume(); ++s) {
        const auto c = lat.coord(s);
        shifts.push_back(translation_operator(lat, space, c));
    }
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<std::size_t> pick(0, clusters.size() - 1);
    for (int attempt = 0; attempt < 200; ++attempt) {
        const auto [b, en] = clusters[pick(rng)];
        Vec v = Vec::Zero(space.dim());
        for (Eigen::Index i = b; i < en; ++i) v += cplx(gauss(rng), gauss(rng)) * eig.eigenvectors().col(i);
        Vec sym = Vec::Zero(space.dim());
        for (const auto& t : shifts) sym += t * v;
        if (sym.norm() > 1e-6 * v.norm()) return ManyBodyState::normalized(sym, lat, space);
    }
    throw ConvergenceError("random_invariant_state: no translation-invariant draw found");
}

env::SpatialKernel random_psd_kernel(const lattice::Lattice& lattice, std::mt19937_64& rng) {
    const int n = lattice.volume();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> spectrum(static_cast<std::size_t>(n));
    for (auto& s : spectrum) s = unit(rng) < 0.3 ? 0.0 : unit(rng);
    spectrum[0] = std::max(spectrum[0], 0.05);  // keeps f(0) > 0
    std::vector<double> sym(spectrum.size());
    for (int q = 0; q < n; ++q) {
        sym[static_cast<std::size_t>(q)] =
            0.5 * (spectrum[static_cast<std::size_t>(q)] + spectrum[static_cast<std::size_t>(lattice.negate_momentum(q))]);
    }
    // f(r) = |Lambda|^{-1} sum_q fhat(q) e^{iqr}.
    std::vector<double> table(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < n; ++r) {
        cplx acc{0.0, 0.0};
        for (int q = 0; q < n; ++q) acc += sym[static_cast<std::size_t>(q)] * lattice.phase(q, r);
        table[static_cast<std::size_t>(r)] = acc.real() / n;
    }
    return env::SpatialKernel::tabulated(std::move(table));
}

std::vector<int> random_contact(const lattice::Lattice& lattice, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    std::vector<int> sites;
    for (int x = 0; x < lattice.volume(); ++x) {
        if (coin(rng)) sites.push_back(x);
    }
    if (sites.empty()) {
        std::uniform_int_distribution<int> one(0, lattice.volume() - 1);
        sites.push_back(one(rng));
    }
    return sites;
}

Mat random_site_operator(int q, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Mat a(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
    return a;
}

}  // namespace ssblab::experiments
