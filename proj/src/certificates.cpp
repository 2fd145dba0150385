// Decoherence-rate certificates for single states and vacuum pairs.

#include "ssblab/fragility.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssblab::fragility {

namespace {

constexpr int kStationarityPoints = 17;
constexpr double kStationarityTolerance = 1e-10;
constexpr double kNuRefinementTolerance = 1e-6;

std::string format(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

}  // namespace

Certificate theorem1_certificate(const ManyBodyState& phi,
                                 const dynamics::UnitaryEvolution& evolution,
                                 const env::InteractionSpec& interaction, double t,
                                 const FirstOrderOptions& options) {
    interaction.validate();
    Certificate cert;
    cert.name = "theorem1";
    cert.time = t;
    cert.lambda2 = interaction.lambda * interaction.lambda;
    cert.tolerance = kCertificateTolerance;

    bool ok = true;
    const double overlap = unit_translation_overlap(phi);
    if (overlap < 1.0 - kTranslationTolerance) {
        ok = false;
        cert.notes.push_back("preconditions unmet: state is not translation invariant (|<phi|T phi>| = " +
                             format(overlap) + ")");
    }
    // <dA^dag dA> must be constant along the closed trajectory.
    for (const env::Channel& ch : interaction.channels) {
        const SpMat intensive = build_intensive(ch.op, ch.corr.lattice);
        const double f0 = fluctuation(phi, intensive);
        double drift = 0.0;
        for (int i = 1; i < kStationarityPoints; ++i) {
            const double s = t * i / (kStationarityPoints - 1);
            drift = std::max(drift, std::abs(fluctuation(evolution.evolve(phi, s), intensive) - f0));
        }
        if (drift > kStationarityTolerance * std::max(1.0, std::abs(f0))) {
            ok = false;
            cert.notes.push_back("preconditions unmet: fluctuation of channel '" + ch.label +
                                 "' drifts by " + format(drift));
        }
    }
    cert.preconditions_met = ok;

    const FirstOrderResult s1 = first_order_entropy(phi, evolution, interaction, t, options);
    cert.lhs = s1.value;
    cert.rhs = theorem1_rate(phi, interaction) * t;
    cert.slack = cert.lhs - cert.rhs;
    cert.grid_points = s1.n_quad + 1;
    cert.passed = ok && cert.slack >= -cert.tolerance;
    return cert;
}

Theorem2Certificate theorem2_certificate(const models::VacuumPair& pair,
                                         const dynamics::UnitaryEvolution& evolution,
                                         const env::InteractionSpec& interaction,
                                         const LocalOperatorField& order_parameter, double t,
                                         double horizon, const Theorem2Options& options) {
    interaction.validate();
    if (interaction.channels.size() != 1) {
        throw DomainError("theorem2: exactly one channel is required, got " +
                          std::to_string(interaction.channels.size()));
    }
    const env::Channel& ch = interaction.channels.front();
    if (!ch.site_op || ch.site_op->rows() != order_parameter.site_op.rows() ||
        (*ch.site_op - order_parameter.site_op).norm() > 1e-14) {
        throw DomainError("theorem2: interaction operator a differs from the order parameter m");
    }
    if (!pair.ppv_parity.phi_plus || !pair.ppv_parity.phi_minus) {
        throw DomainError("theorem2: PPV lacks one of its parity components");
    }
    if (!(t >= 0.0) || !(horizon >= t)) {
        throw DomainError("theorem2: need 0 <= t <= horizon");
    }
    if (options.horizon_points < 32) throw DomainError("theorem2: horizon_points must be >= 32");

    Theorem2Certificate out;
    Certificate& cert = out.base;
    cert.name = "theorem2";
    cert.time = t;
    cert.lambda2 = interaction.lambda * interaction.lambda;
    cert.tolerance = kCertificateTolerance;
    cert.preconditions_met = true;
    out.horizon = horizon;

    const ManyBodyState& afv = pair.afv;
    const SpMat m = build_intensive(order_parameter, afv.lattice(), afv.space());
    const double g00 = ch.corr.g00;

    const FirstOrderResult r_afv = first_order_entropy(afv, evolution, interaction, t, options.quadrature);
    const FirstOrderResult r_ppv =
        first_order_entropy(pair.ppv, evolution, interaction, t, options.quadrature);
    out.s_afv = r_afv.value;
    out.s_ppv = r_ppv.value;
    out.afv_fluctuation = fluctuation(afv, m);

    const auto& parts = pair.ppv_parity;
    out.c_plus = std::abs(parts.c_plus);
    out.c_minus = std::abs(parts.c_minus);
    const double s_plus =
        first_order_entropy(*parts.phi_plus, evolution, interaction, t, options.quadrature).value;
    const double s_minus =
        first_order_entropy(*parts.phi_minus, evolution, interaction, t, options.quadrature).value;
    out.mixture = out.c_plus * out.c_plus * s_plus + out.c_minus * out.c_minus * s_minus;
    out.mixture_defect = out.s_afv - out.mixture;

    auto nu_on = [&](int points) {
        double nu = std::abs(pair.ppv.expectation(m));
        for (int i = 1; i < points; ++i) {
            const double s = horizon * i / (points - 1);
            nu = std::min(nu, std::abs(evolution.evolve(pair.ppv, s).expectation(m)));
        }
        return nu;
    };
    const double nu_coarse = nu_on(options.horizon_points);
    out.nu = nu_on(2 * options.horizon_points - 1);
    if (std::abs(nu_coarse - out.nu) > kNuRefinementTolerance) {
        throw ConvergenceError("theorem2: nu changed by " + format(std::abs(nu_coarse - out.nu)) +
                               " under grid refinement; raise horizon_points");
    }

    out.nu_defect = cert.lambda2 * g00 * t * std::max(0.0, out.afv_fluctuation - out.nu * out.nu);
    out.epsilon_hat = std::abs(out.mixture_defect) + out.nu_defect;

    cert.lhs = out.s_afv - out.s_ppv;
    cert.rhs = cert.lambda2 * g00 * t * out.afv_fluctuation;
    cert.slack = cert.lhs - cert.rhs;
    cert.grid_points = r_afv.n_quad + 1;
    cert.passed = cert.slack >= -out.epsilon_hat - cert.tolerance && cert.lhs >= -cert.tolerance;
    if (!cert.passed) {
        cert.notes.push_back("slack " + format(cert.slack) + " below -epsilon_hat = " +
                             format(-out.epsilon_hat));
    }
    return out;
}

}  // namespace ssblab::fragility
