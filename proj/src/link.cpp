#include "atomlink/link.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "atomlink/error.hpp"

namespace atomlink::link {

void LinkParams::validate() const {
    detail::require_non_negative(length_km, "fiber length");
    detail::require_non_negative(attenuation_db_per_km, "fiber attenuation");
    if (!(fiber_speed_km_per_s > 0.0)) {
        throw ParameterError("fiber photon speed must be positive");
    }
    detail::require_probability(eta_collect, "collection efficiency");
    detail::require_probability(eta_switch, "switch transmission");
    detail::require_probability(eta_qfc, "conversion efficiency");
    detail::require_probability(eta_filter, "filter transmission");
    detail::require_probability(eta_projection, "projection efficiency");
    detail::require_probability(eta_connectors, "connector transmission");
    detail::require_probability(eta_detector, "detector efficiency");
    if (n_detectors < 0) {
        throw ParameterError("detector count must be >= 0");
    }
    detail::require_non_negative(dark_count_cps, "dark-count rate");
    detail::require_non_negative(qfc_background_cps, "conversion background rate");
    detail::require_non_negative(window_ns, "acceptance window");
    detail::require_probability(window_fraction, "in-window signal fraction");
}

double fiber_transmission(double length_km, double attenuation_db_per_km) {
    detail::require_non_negative(length_km, "fiber length");
    detail::require_non_negative(attenuation_db_per_km, "fiber attenuation");
    return std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
}

double travel_time_us(double length_km, double fiber_speed_km_per_s) {
    detail::require_non_negative(length_km, "fiber length");
    if (!(fiber_speed_km_per_s > 0.0)) {
        throw ParameterError("fiber photon speed must be positive");
    }
    return length_km / fiber_speed_km_per_s * 1e6;
}

double zero_length_efficiency(const LinkParams& p) {
    return p.eta_collect * p.eta_switch * p.eta_qfc * p.eta_filter * p.eta_projection * p.eta_connectors * p.eta_detector;
}

double signal_click_probability(const LinkParams& params) {
    params.validate();
    return params.window_fraction * zero_length_efficiency(params) *
           fiber_transmission(params.length_km, params.attenuation_db_per_km);
}

NoiseClicks noise_click_probability(const LinkParams& params) {
    params.validate();
    const double window_s = params.window_ns * 1e-9;
    const double t = fiber_transmission(params.length_km, params.attenuation_db_per_km);
    return {params.qfc_background_cps * t * window_s, params.n_detectors * params.dark_count_cps * window_s};
}

ClickBreakdown click_breakdown(const LinkParams& params) {
    const auto noise = noise_click_probability(params);
    return {signal_click_probability(params), noise.p_qfc, noise.p_dark};
}

double snr(const LinkParams& params) {
    const auto clicks = click_breakdown(params);
    if (clicks.noise() == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return clicks.p_signal / clicks.noise();
}

double noise_crossover_km(const LinkParams& params) {
    params.validate();
    const double dark = params.n_detectors * params.dark_count_cps;
    if (dark == 0.0 || params.attenuation_db_per_km == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (dark >= params.qfc_background_cps) {
        return 0.0;
    }
    return -10.0 / params.attenuation_db_per_km * std::log10(dark / params.qfc_background_cps);
}

LinkParams calibrate_noise(const LinkParams& params, std::span<const SnrAnchor> anchors) {
    if (anchors.size() < 2) {
        throw ParameterError("noise calibration needs at least two SNR anchors");
    }
    for (const auto& a : anchors) {
        if (!(a.snr > 0.0)) {
            throw ParameterError("SNR anchors must be positive");
        }
    }
    const auto residuals = [&](const Eigen::Vector2d& u) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(anchors.size()));
        LinkParams trial = params;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            trial.length_km = anchors[i].length_km;
            trial.qfc_background_cps = std::exp(u(0));
            trial.dark_count_cps = anchors[i].dark_count_override_cps.value_or(std::exp(u(1)));
            r(static_cast<Eigen::Index>(i)) = std::log(snr(trial) / anchors[i].snr);
        }
        return r;
    };
    Eigen::Vector2d u(std::log(100.0), std::log(5.0));
    double lambda = 1e-3;
    Eigen::VectorXd r = residuals(u);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::MatrixXd jac(r.size(), 2);
        for (int k = 0; k < 2; ++k) {
            Eigen::Vector2d du = Eigen::Vector2d::Zero();
            du(k) = 1e-6;
            jac.col(k) = (residuals(u + du) - residuals(u - du)) / 2e-6;
        }
        const Eigen::Matrix2d jtj = jac.transpose() * jac;
        const Eigen::Vector2d g = jac.transpose() * r;
        Eigen::Matrix2d damped = jtj;
        damped.diagonal() *= 1.0 + lambda;
        const Eigen::Vector2d step = damped.ldlt().solve(-g);
        const Eigen::VectorXd r_new = residuals(u + step);
        if (r_new.squaredNorm() < r.squaredNorm()) {
            u += step;
            r = r_new;
            lambda = std::max(lambda / 10.0, 1e-12);
            if (step.norm() < 1e-12) {
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                break;
            }
        }
    }
    LinkParams out = params;
    out.qfc_background_cps = std::exp(u(0));
    out.dark_count_cps = std::exp(u(1));
    return out;
}

std::vector<SweepRow> snr_sweep(const LinkParams& params, std::span<const double> lengths_km) {
    std::vector<SweepRow> rows;
    rows.reserve(lengths_km.size());
    LinkParams probe = params;
    for (double length : lengths_km) {
        probe.length_km = length;
        rows.push_back({length, click_breakdown(probe), snr(probe)});
    }
    return rows;
}

} // namespace atomlink::link
