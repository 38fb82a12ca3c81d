#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atomlink/analysis.hpp"
#include "atomlink/config.hpp"
#include "atomlink/error.hpp"
#include "atomlink/link.hpp"
#include "atomlink/raman.hpp"
#include "atomlink/rate.hpp"
#include "atomlink/seqsim.hpp"
#include "atomlink/zeeman.hpp"

namespace py = pybind11;
using namespace atomlink;

namespace {

zeeman::QubitBasis parse_basis(const std::string& name) {
    if (name == "initial") {
        return zeeman::QubitBasis::Initial;
    }
    if (name == "memory") {
        return zeeman::QubitBasis::Memory;
    }
    throw ParameterError("basis must be 'initial' or 'memory'");
}

std::vector<analysis::FitPoint> points(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw ParameterError("x and y must have the same length");
    }
    std::vector<analysis::FitPoint> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.push_back({x[i], y[i], 0.0});
    }
    return out;
}

py::dict summary_dict(const seqsim::RunSummary& s) {
    py::dict d;
    d["records"] = s.records;
    d["attempts"] = s.attempts;
    d["bursts"] = s.bursts;
    d["wall_hours"] = s.wall_us / 3.6e9;
    d["active_hours"] = s.active_us / 3.6e9;
    d["signal"] = s.by_truth[0];
    d["qfc"] = s.by_truth[1];
    d["dark"] = s.by_truth[2];
    d["generator"] = s.generator;
    d["seed"] = s.seed;
    py::dict counts;
    for (std::size_t i = 0; i < s.counts.size(); ++i) {
        counts[py::str(s.setting_labels[i])] = s.counts[i].n;
    }
    d["counts"] = counts;
    return d;
}

} // namespace

PYBIND11_MODULE(_atomlink, m) {
    m.doc() = "Atom-photon entanglement link model";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
    py::register_exception<SingularityError>(m, "SingularityError", PyExc_ZeroDivisionError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);

    m.def("suppression_factor", [](double b) { return zeeman::suppression_factor(b); }, py::arg("b_gauss"));
    m.def("larmor_frequency_khz",
          [](const std::string& basis, double b) { return zeeman::larmor_frequency_khz(parse_basis(basis), b); },
          py::arg("basis"), py::arg("b_gauss"));
    m.def("breit_rabi_energy", [](int f, int mf, double b) { return zeeman::breit_rabi_energy(f, mf, b); },
          py::arg("f"), py::arg("m"), py::arg("b_gauss"));

    py::class_<link::LinkParams>(m, "LinkParams")
        .def(py::init<>())
        .def_readwrite("length_km", &link::LinkParams::length_km)
        .def_readwrite("attenuation_db_per_km", &link::LinkParams::attenuation_db_per_km)
        .def_readwrite("fiber_speed_km_per_s", &link::LinkParams::fiber_speed_km_per_s)
        .def_readwrite("eta_collect", &link::LinkParams::eta_collect)
        .def_readwrite("n_detectors", &link::LinkParams::n_detectors)
        .def_readwrite("dark_count_cps", &link::LinkParams::dark_count_cps)
        .def_readwrite("qfc_background_cps", &link::LinkParams::qfc_background_cps)
        .def_readwrite("window_ns", &link::LinkParams::window_ns)
        .def_readwrite("window_fraction", &link::LinkParams::window_fraction);

    m.def("signal_click_probability", &link::signal_click_probability, py::arg("params"));
    m.def("snr", &link::snr, py::arg("params"));
    m.def("noise_crossover_km", &link::noise_crossover_km, py::arg("params"));

    py::class_<rate::TimingBudget>(m, "TimingBudget")
        .def(py::init<>())
        .def_readwrite("prep_us", &rate::TimingBudget::prep_us)
        .def_readwrite("entangle_us", &rate::TimingBudget::entangle_us)
        .def_readwrite("raman_us", &rate::TimingBudget::raman_us)
        .def_readwrite("cooling_us", &rate::TimingBudget::cooling_us)
        .def_readwrite("attempts_per_cooling", &rate::TimingBudget::attempts_per_cooling)
        .def("zero_length_period_us", &rate::TimingBudget::zero_length_period_us);

    m.def("attempt_period_us", &rate::attempt_period_us, py::arg("budget"), py::arg("length_km"),
          py::arg("fiber_speed_km_per_s"));
    m.def("max_repetition_rate_hz", &rate::max_repetition_rate_hz, py::arg("budget"), py::arg("length_km"),
          py::arg("fiber_speed_km_per_s"));
    m.def(
        "entanglement_rate",
        [](const rate::TimingBudget& b, const link::LinkParams& p, double phi) {
            return rate::entanglement_rate(b, p, phi).rate_per_s;
        },
        py::arg("budget"), py::arg("params"), py::arg("duty_cycle"));

    m.def(
        "raman_resonances_khz",
        [](double b) {
            const auto cfg = raman::default_config(b);
            constexpr double two_pi = 6.283185307179586;
            return py::make_tuple(raman::delta_three_level(cfg) / two_pi * 1e3,
                                  raman::delta_four_level(cfg) / two_pi * 1e3);
        },
        py::arg("b_gauss"));
    m.def(
        "raman_spectrum",
        [](double b, double lo_khz, double hi_khz, int n) {
            constexpr double two_pi = 6.283185307179586;
            const auto cfg = raman::default_config(b);
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : raman::transfer_spectrum(cfg, two_pi * lo_khz * 1e-3, two_pi * hi_khz * 1e-3, n)) {
                out.emplace_back(p.delta / two_pi * 1e3, p.p_target, p.p_blocked);
            }
            return out;
        },
        py::arg("b_gauss"), py::arg("delta_min_khz"), py::arg("delta_max_khz"), py::arg("n_points"));

    m.def(
        "fit_sinusoid",
        [](const std::vector<double>& theta, const std::vector<double>& p) {
            const auto f = analysis::fit_sinusoid(points(theta, p));
            py::dict d;
            d["offset"] = f.offset;
            d["amplitude"] = f.amplitude;
            d["phase"] = f.phase;
            d["visibility"] = f.visibility;
            d["sigma_visibility"] = f.sigma_visibility;
            return d;
        },
        py::arg("theta"), py::arg("p"));
    m.def(
        "fit_exponential",
        [](const std::vector<double>& t, const std::vector<double>& v) {
            const auto f = analysis::fit_exponential(points(t, v));
            py::dict d;
            d["t2"] = f.t2;
            d["v0"] = f.v0;
            d["sigma_t2"] = f.sigma_t2;
            d["sigma_v0"] = f.sigma_v0;
            d["warnings"] = f.warnings;
            return d;
        },
        py::arg("t"), py::arg("v"));
    m.def("fidelity_lower_bound", py::overload_cast<double>(&analysis::fidelity_lower_bound), py::arg("mean_visibility"));
    m.def(
        "chsh_from_counts",
        [](const std::vector<std::pair<std::uint64_t, std::uint64_t>>& counts) {
            if (counts.size() != 4) {
                throw ParameterError("need exactly four (same, different) pairs");
            }
            std::array<analysis::SettingCounts, 4> c{};
            for (std::size_t i = 0; i < 4; ++i) {
                c[i] = {counts[i].first, counts[i].second};
            }
            const auto e = analysis::chsh_from_counts(c);
            return py::make_tuple(e.s, e.sigma);
        },
        py::arg("counts"));

    py::class_<config::ScenarioConfig>(m, "Scenario")
        .def_readonly("name", &config::ScenarioConfig::name)
        .def("to_json", [](const config::ScenarioConfig& c) { return config::to_json_text(c); });
    m.def("load_scenario", [](const std::string& path) { return config::load_scenario(path); }, py::arg("path"));
    m.def("parse_scenario", [](const std::string& text) { return config::parse_scenario(text); }, py::arg("text"));
    m.def("load_preset", [](const std::string& name) { return config::load_scenario(config::find_preset(name)); },
          py::arg("name"));

    m.def(
        "predict_three_basis",
        [](const config::ScenarioConfig& c) {
            const auto p = seqsim::predict_three_basis(c.sequence);
            return py::make_tuple(p.e_x, p.e_y, p.e_z, p.fidelity_bound());
        },
        py::arg("scenario"));
    m.def(
        "simulate",
        [](const config::ScenarioConfig& c, std::uint64_t events, std::optional<std::uint64_t> seed) {
            auto seq = c.sequence;
            if (seed) {
                seq.rng_seed = *seed;
            }
            seqsim::StopCondition stop;
            stop.max_events = events;
            seqsim::Campaign campaign;
            {
                py::gil_scoped_release release;
                campaign = seqsim::run_campaign(seq, stop);
            }
            return summary_dict(campaign.summary);
        },
        py::arg("scenario"), py::arg("events"), py::arg("seed") = py::none());
}
