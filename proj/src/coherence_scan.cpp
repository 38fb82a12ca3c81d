#include "atomlink/coherence_scan.hpp"

#include <cmath>
#include <numbers>

#include "atomlink/error.hpp"
#include "atomlink/rng.hpp"

namespace atomlink::decoherence {

std::vector<double> linear_delays(double t_max_us, int n) {
    if (n < 1) {
        throw ParameterError("need at least one delay");
    }
    detail::require_non_negative(t_max_us, "maximum delay");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(n == 1 ? 0.0 : t_max_us * i / (n - 1));
    }
    return out;
}

ScanResult run_scan(const ScanConfig& config) {
    config.model.validate();
    if (config.angles < 4) {
        throw ParameterError("coherence scan needs at least 4 angles per delay");
    }
    if (config.counts_per_angle == 0) {
        throw ParameterError("coherence scan needs counts per angle");
    }
    // V0 enters as uncorrelated admixture on the ideal state.
    const auto start = qstate::mix_uncorrelated_noise(qstate::ideal_entangled_state(), 1.0 - config.model.v0);
    const auto photon = qstate::PhotonBasis::linear(0.0);
    const Rng base(config.seed, 2);

    ScanResult result;
    std::vector<analysis::FitPoint> decay_points;
    for (std::size_t d = 0; d < config.delays_us.size(); ++d) {
        const double t = config.delays_us[d];
        const auto rho = evolve(start, config.model, t);
        Rng rng = base.derive(d);
        std::vector<analysis::FitPoint> pts;
        for (int k = 0; k < config.angles; ++k) {
            const double theta = std::numbers::pi * k / config.angles;
            const auto table = qstate::outcome_probabilities(rho, {photon, qstate::AtomBasis::linear(theta)});
            const double p = table.p[0][0] / (table.p[0][0] + table.p[0][1] + table.p[0][2]);
            const auto hits = rng.binomial(config.counts_per_angle, p);
            pts.push_back({theta, static_cast<double>(hits) / static_cast<double>(config.counts_per_angle), 0.0});
        }
        const auto fit = analysis::fit_sinusoid(pts);
        result.points.push_back({t, fit});
        decay_points.push_back({t, fit.visibility, fit.sigma_visibility});
    }
    result.decay = analysis::fit_exponential(decay_points);
    return result;
}

} // namespace atomlink::decoherence
