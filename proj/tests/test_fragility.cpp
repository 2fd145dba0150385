#include "doctest.h"

#include "oracles.hpp"

#include "ssblab/errors.hpp"
#include "ssblab/experiments.hpp"
#include "ssblab/fragility.hpp"

#include <random>

using namespace ssblab;
using namespace ssblab::fragility;
using dynamics::UnitaryEvolution;
using lattice::Lattice;

namespace {

struct IsingSetup {
    models::IsingModel model;
    models::VacuumPair pair;
    UnitaryEvolution evo;
    env::InteractionSpec inter;
};

IsingSetup ising(int L, double h, double lambda, env::SpatialKernel kernel, std::vector<int> contact = {}) {
    auto m = models::build_ising(L, 1, 1.0, h);
    auto pair = h == 0.0 ? models::build_afv_ising(m) : models::build_spectral_pair(m);
    if (contact.empty()) contact = env::all_sites(m.lattice);
    auto g = env::build_g_matrix(kernel, 1.0, contact, m.lattice);
    auto inter = env::single_channel(lambda, m.order_field(), m.lattice, m.space, g);
    UnitaryEvolution evo(m.hamiltonian);
    return IsingSetup{std::move(m), std::move(pair), std::move(evo), std::move(inter)};
}

std::vector<Mat> site_ops(const Mat& a, int L, int q) {
    std::vector<Mat> out;
    for (int x = 0; x < L; ++x) out.push_back(oracle::embed(a, x, L, q));
    return out;
}

}  // namespace

TEST_CASE("linear entropy examples") {
    const auto m = models::build_ising(2, 1, 1.0);
    CHECK(linear_entropy(dynamics::DensityMatrix::pure(models::xi_plus(m))) == doctest::Approx(0.0));
    CHECK(linear_entropy(dynamics::DensityMatrix(Mat::Identity(4, 4) / 4.0)) == doctest::Approx(0.75));
    Mat mix = Mat::Zero(4, 4);
    mix(0, 0) = mix(3, 3) = 0.5;
    CHECK(linear_entropy(dynamics::DensityMatrix(mix)) == doctest::Approx(0.5));
}

TEST_CASE("correlation density equals the real-space integrand") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss;
    const int L = 5;
    const Lattice lat(1, L);
    const TensorSpace sp = TensorSpace::uniform(L, 2);
    for (int trial = 0; trial < 10; ++trial) {
        Vec v(sp.dim());
        for (auto& a : v) a = cplx(gauss(rng), gauss(rng));
        const auto phi = ManyBodyState::normalized(v, lat, sp);
        Mat a(2, 2);
        for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = cplx(gauss(rng), gauss(rng));
        const std::vector<int> contact = trial % 2 ? std::vector<int>{0, 2, 3} : env::all_sites(lat);
        const double xi = 0.5 + trial * 0.3;
        const auto g = env::build_g_matrix(env::SpatialKernel::exponential(xi), 0.7, contact, lat);
        const auto inter = env::single_channel(1.0, LocalOperatorField(a), lat, sp, g);
        const double ref = oracle::real_space_integrand(
            phi.amplitudes(), site_ops(a, L, 2), contact, 0.7,
            [&](int x, int y) { return std::exp(-oracle::ring_distance(x, y, L) / xi); });
        CHECK(correlation_density(phi, inter) == doctest::Approx(ref).epsilon(1e-11));
    }
}

TEST_CASE("Ising closed forms: S1(Phi0) = lambda^2 g00 t, S1(Xi+) = 0") {
    const auto s = ising(6, 0.0, 0.05, env::SpatialKernel::constant());
    const double g00 = s.inter.channels[0].corr.g00;
    CHECK(g00 == doctest::Approx(36.0));
    for (double t : {0.5, 1.0, 3.0}) {
        const auto afv = first_order_entropy(s.pair.afv, s.evo, s.inter, t);
        CHECK(afv.value == doctest::Approx(0.0025 * g00 * t).epsilon(1e-12));
        CHECK(first_order_entropy(s.pair.ppv, s.evo, s.inter, t).value == doctest::Approx(0.0).scale(1.0));
    }
    CHECK(first_order_entropy(s.pair.afv, s.evo, s.inter, 0.0).value == 0.0);
    CHECK_THROWS_AS(first_order_entropy(s.pair.afv, s.evo, s.inter, -1.0), DomainError);
    FirstOrderOptions odd;
    odd.n_quad = 9;
    CHECK_THROWS_AS(first_order_entropy(s.pair.afv, s.evo, s.inter, 1.0, odd), DomainError);
}

TEST_CASE("quadrature non-convergence raises") {
    const auto s = ising(4, 1.5, 0.1, env::SpatialKernel::exponential(1.0), {0});
    FirstOrderOptions coarse;
    coarse.n_quad = 8;
    CHECK_THROWS_AS(first_order_entropy(models::xi_plus(s.model), s.evo, s.inter, 40.0, coarse), ConvergenceError);
}

TEST_CASE("first-order series matches point evaluations") {
    const auto s = ising(4, 0.7, 0.1, env::SpatialKernel::exponential(1.0), {0, 1});
    const auto xi = models::xi_plus(s.model);
    const auto series = first_order_series(xi, s.evo, s.inter, 2.0, 5, 16);
    REQUIRE(series.size() == 5);
    CHECK(series[0] == 0.0);
    for (int i = 1; i < 5; ++i) {
        FirstOrderOptions o;
        o.n_quad = 128;
        CHECK(series[i] == doctest::Approx(first_order_entropy(xi, s.evo, s.inter, 0.5 * i, o).value).epsilon(1e-8));
    }
}

TEST_CASE("boson entropies match the brute-force correlation sums") {
    const int L = 3, n_max = 4;
    const auto b = models::build_free_boson(L, 1, n_max);
    const auto st = models::build_boson_states(b, 2, cplx(0.25, 0.0));
    const auto g = env::build_g_matrix(env::SpatialKernel::exponential(0.8), 1.0, {0, 1}, b.lattice);
    env::InteractionSpec inter;
    inter.lambda = 0.1;
    inter.channels.push_back(env::Channel{"psi", b.psi(), std::nullopt, g});
    inter.channels.push_back(env::Channel{"psi_dag", b.psi_dag(), std::nullopt, g});

    // psi(x) from Kronecker-built mode operators.
    std::vector<Mat> psi(L, Mat::Zero(b.space.dim(), b.space.dim()));
    for (int x = 0; x < L; ++x)
        for (int k = 0; k < L; ++k)
            psi[x] += std::polar(1.0, 2 * oracle::kPi * k * x / L) * oracle::embed(oracle::lower(n_max), k, L, n_max + 1);
    std::vector<Mat> psid;
    for (auto& p : psi) {
        p /= std::sqrt(double(L));
        psid.push_back(p.adjoint());
    }
    auto f = [&](int x, int y) { return std::exp(-oracle::ring_distance(x, y, L) / 0.8); };
    for (const ManyBodyState* phi : {&st.number, &st.coherent}) {
        const double ref = oracle::real_space_integrand(phi->amplitudes(), psi, {0, 1}, 1.0, f) +
                           oracle::real_space_integrand(phi->amplitudes(), psid, {0, 1}, 1.0, f);
        CHECK(correlation_density(*phi, inter) == doctest::Approx(ref).epsilon(1e-10));
    }
    // Closed form for the number state with n0 = N / |Lambda|.
    const double trace_g = g.g.trace().real();
    const double expected = oracle::boson_number_rate(0.1, 2.0 / L, g.g00, g.g00, trace_g, L);
    const UnitaryEvolution evo(b.hamiltonian);
    CHECK(first_order_entropy(st.number, evo, inter, 1.0).value == doctest::Approx(expected).epsilon(1e-10));
    CHECK(first_order_entropy(st.coherent, evo, inter, 1.0).value ==
          doctest::Approx(0.01 * trace_g / L).epsilon(1e-6));  // Fock truncation
}

TEST_CASE("theorem 1 certificate: AFV equality, PPV zero") {
    const auto s = ising(6, 0.0, 0.02, env::SpatialKernel::exponential(1.5), {0, 1, 2});
    const auto afv = theorem1_certificate(s.pair.afv, s.evo, s.inter, 2.0);
    CHECK(afv.preconditions_met);
    CHECK(afv.passed);
    CHECK(std::abs(afv.slack) < 1e-10 * std::max(1.0, afv.lhs));
    const auto ppv = theorem1_certificate(s.pair.ppv, s.evo, s.inter, 2.0);
    CHECK(ppv.passed);
    CHECK(ppv.lhs == doctest::Approx(0.0).scale(1.0));
    CHECK(ppv.rhs == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("theorem 1 preconditions are checked, not assumed") {
    const auto s = ising(4, 0.8, 0.05, env::SpatialKernel::constant());
    // Xi+ is translation invariant but not stationary once h != 0.
    FirstOrderOptions fine;
    fine.n_quad = 256;
    const auto moving = theorem1_certificate(models::xi_plus(s.model), s.evo, s.inter, 1.0, fine);
    CHECK_FALSE(moving.preconditions_met);
    CHECK_FALSE(moving.passed);
    CHECK(moving.notes.front().find("preconditions unmet") == 0);
    // |up up up down> breaks translation invariance.
    Vec v = Vec::Zero(16);
    v(1) = 1.0;
    const ManyBodyState kink(v, s.model.lattice, s.model.space);
    CHECK_FALSE(theorem1_certificate(kink, s.evo, s.inter, 1.0).preconditions_met);
}

TEST_CASE("theorem 1 holds on random stationary translation-invariant states") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int L = 3 + trial % 4;  // 3..6
        const double h = trial % 3 == 0 ? 0.0 : 0.4 * (trial % 5);
        const auto m = models::build_ising(L, 1, 1.0, h);
        const UnitaryEvolution evo(m.hamiltonian);
        const auto phi = experiments::random_invariant_state(m, rng);
        const auto g = env::build_g_matrix(experiments::random_psd_kernel(m.lattice, rng), 1.0,
                                           experiments::random_contact(m.lattice, rng), m.lattice);
        const LocalOperatorField a(experiments::random_site_operator(2, rng), "a");
        const auto inter = env::single_channel(0.1, a, m.lattice, m.space, g);
        const auto cert = theorem1_certificate(phi, evo, inter, 1.0);
        REQUIRE(cert.preconditions_met);
        CHECK(cert.slack >= -kCertificateTolerance);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("theorem 2 certificate on the bare Ising pair") {
    const auto s = ising(6, 0.0, 0.03, env::SpatialKernel::constant());
    const auto c = theorem2_certificate(s.pair, s.evo, s.inter, s.model.order_field(), 1.0, 2.0);
    CHECK(c.base.passed);
    CHECK(c.base.lhs == doctest::Approx(0.0009 * 36.0));
    CHECK(c.base.rhs == doctest::Approx(0.0009 * 36.0));
    CHECK(std::abs(c.base.slack) < 1e-10);
    CHECK(c.nu == doctest::Approx(1.0));
    CHECK(c.epsilon_hat < 1e-12);
}

TEST_CASE("theorem 2 with a transverse field: slack bounded by epsilon_hat") {
    const auto s = ising(6, 0.5, 0.03, env::SpatialKernel::constant(), {0, 1});
    const auto c = theorem2_certificate(s.pair, s.evo, s.inter, s.model.order_field(), 1.0, 1.0);
    CHECK(c.base.lhs >= 0.0);
    CHECK(c.base.slack >= -c.epsilon_hat - 1e-9);
    CHECK(c.base.passed);
    CHECK(c.nu > 0.0);
    CHECK(c.nu <= std::abs(s.pair.ppv.expectation(s.model.magnetization())) + 1e-12);
}

TEST_CASE("theorem 2 input errors") {
    const auto s = ising(4, 0.0, 0.03, env::SpatialKernel::constant());
    const LocalOperatorField other(ops::s1(), "s1");
    CHECK_THROWS_AS(theorem2_certificate(s.pair, s.evo, s.inter, other, 1.0, 1.0), DomainError);
    models::VacuumPair eigen_pair{s.pair.afv, s.pair.afv, models::parity_decompose(s.pair.afv, s.model.parity)};
    CHECK_THROWS_AS(theorem2_certificate(eigen_pair, s.evo, s.inter, s.model.order_field(), 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(theorem2_certificate(s.pair, s.evo, s.inter, s.model.order_field(), 2.0, 1.0), DomainError);
}

TEST_CASE("correlation regions: PPV a single site, AFV the whole lattice") {
    const auto s = ising(6, 0.0, 0.01, env::SpatialKernel::constant());
    for (double eps : {0.1, 0.5, 0.9, 1.0}) {
        const auto rp = correlation_region(StateTrajectory{s.pair.ppv, s.evo}, 2, eps, 1.0);
        CHECK(rp.members == std::vector<int>{2});
        const auto ra = correlation_region(StateTrajectory{s.pair.afv, s.evo}, 2, eps, 1.0);
        CHECK(ra.volume() == 6);
    }
    CHECK(canonical_correlation(s.pair.afv, 0, 3) == doctest::Approx(1.0));
    CHECK(canonical_correlation(s.pair.ppv, 0, 3) == doctest::Approx(0.0).scale(1.0));
    CHECK(canonical_correlation(s.pair.ppv, 3, 3) == doctest::Approx(1.0));
    CHECK_THROWS_AS(correlation_region(StateTrajectory{s.pair.ppv, s.evo}, 0, 1.5, 1.0), DomainError);
    CHECK_THROWS_AS(correlation_region(StateTrajectory{s.pair.ppv, s.evo}, 9, 0.5, 1.0), DomainError);
}

TEST_CASE("correlation regions are monotone in epsilon and independent of y") {
    const auto s = ising(6, 0.9, 0.01, env::SpatialKernel::constant());
    const StateTrajectory traj{s.pair.afv, s.evo};
    int previous = 7;
    for (double eps : {0.05, 0.2, 0.4, 0.7}) {
        const auto r = correlation_region(traj, 0, eps, 0.5);
        CHECK(r.volume() <= previous);
        CHECK(r.contains(0));
        previous = r.volume();
        for (int y = 1; y < 6; ++y) CHECK(correlation_region(traj, y, eps, 0.5).volume() == r.volume());
    }
}

TEST_CASE("intensive fluctuation bound") {
    const auto s = ising(6, 0.0, 0.01, env::SpatialKernel::constant());
    const StateTrajectory tp{s.pair.ppv, s.evo};
    const auto rp = correlation_region(tp, 0, 1e-6, 1.0);
    const auto bp = intensive_fluctuation_bound(tp, s.model.order_field(), rp);
    CHECK(bp.holds);
    CHECK(bp.clustering);
    CHECK(rp.volume() == 1);
    for (double l : bp.lhs) CHECK(l == doctest::Approx(0.0).scale(1.0));

    const StateTrajectory ta{s.pair.afv, s.evo};
    const auto ra = correlation_region(ta, 0, 0.5, 1.0);
    const auto ba = intensive_fluctuation_bound(ta, s.model.order_field(), ra);
    CHECK(ba.holds);
    CHECK_FALSE(ba.clustering);
    CHECK(ba.volume_fraction == doctest::Approx(1.0));  // the bound is not small

    // Single site: the intensive operator is the site operator itself.
    const Lattice one(1, 1);
    Vec v(2);
    v << 0.6, 0.8;
    const ManyBodyState q(v, one, TensorSpace::uniform(1, 2));
    const UnitaryEvolution evo(SpMat(ops::s1().sparseView()));
    const StateTrajectory tq{q, evo};
    const auto rq = correlation_region(tq, 0, 0.5, 1.0);
    const auto bq = intensive_fluctuation_bound(tq, LocalOperatorField(ops::s3()), rq);
    CHECK(bq.holds);
    for (std::size_t i = 0; i < bq.lhs.size(); ++i) CHECK(bq.lhs[i] * 1.5 == doctest::Approx(bq.rhs[i]));
}

TEST_CASE("rate extraction") {
    const auto s = ising(4, 0.0, 0.02, env::SpatialKernel::constant());
    const auto afv = first_order_report(s.pair.afv, s.evo, s.inter, 2.0, 11);
    const auto est = rate_extract(afv);
    CHECK(est.gamma == doctest::Approx(0.0004 * 16.0));
    CHECK_FALSE(est.nonlinear);
    CHECK(afv.slack == doctest::Approx(0.0).scale(1e-3));
    const auto ppv = first_order_report(s.pair.ppv, s.evo, s.inter, 2.0, 11);
    CHECK(rate_difference(afv, ppv) == doctest::Approx(0.0004 * 16.0));

    const auto zero = ising(4, 0.0, 0.0, env::SpatialKernel::constant());
    CHECK(rate_extract(first_order_report(zero.pair.afv, zero.evo, zero.inter, 1.0, 5)).gamma == 0.0);

    // A non-eigenstate with a strongly curved S1 is flagged.
    const auto tf = ising(4, 1.2, 0.1, env::SpatialKernel::delta(), {0});
    EntropyReport curved = first_order_report(models::xi_plus(tf.model), tf.evo, tf.inter, 6.0, 25);
    curved.s_first.back() *= 3.0;
    const auto flagged = rate_extract(curved);
    CHECK(flagged.nonlinear);
    CHECK(flagged.windowed_slopes.size() == 24);
    EntropyReport tiny;
    tiny.times = {0.0};
    tiny.s_first = {0.0};
    CHECK_THROWS_AS(rate_extract(tiny), DomainError);
}

TEST_CASE("full dynamics approaches 4 S1 with an O(lambda^4) residual") {
    const auto base = ising(4, 0.0, 1.0, env::SpatialKernel::constant());
    const double t = 1.0;
    double last = 0.0;
    for (double lambda : {0.02, 0.01}) {
        auto inter = base.inter;
        inter.lambda = lambda;
        const dynamics::LindbladGenerator gen(base.model.hamiltonian, inter);
        const auto traj = dynamics::propagate(dynamics::DensityMatrix::pure(base.pair.afv), gen, t,
                                              std::max(100, dynamics::minimum_steps(gen, t)));
        const double s1 = first_order_entropy(base.pair.afv, base.evo, inter, t).value;
        const double residual = std::abs(traj.rows.back().linear_entropy - 4.0 * s1);
        const double s_lin = traj.rows.back().linear_entropy;
        CHECK(s_lin >= 0.0);
        CHECK(s_lin <= 1.0 - 1.0 / 16);
        if (last > 0.0) CHECK(last / residual == doctest::Approx(16.0).epsilon(0.05));
        last = residual;
    }
}
