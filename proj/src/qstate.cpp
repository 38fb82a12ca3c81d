#include "atomlink/qstate.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "atomlink/error.hpp"

namespace atomlink::qstate {
namespace {

using Vector2 = Eigen::Matrix<Complex, 2, 1>;

Vector2 plus_state(const BlochDirection& d) {
    Vector2 v;
    v(0) = std::cos(d.polar / 2.0);
    v(1) = std::polar(std::sin(d.polar / 2.0), d.azimuth);
    return v;
}

Vector2 minus_state(const BlochDirection& d) {
    Vector2 v;
    v(0) = -std::polar(std::sin(d.polar / 2.0), -d.azimuth);
    v(1) = std::cos(d.polar / 2.0);
    return v;
}

bool finite(const BlochDirection& d) { return std::isfinite(d.polar) && std::isfinite(d.azimuth); }

} // namespace

PhotonBasis PhotonBasis::linear(double theta) {
    return {BlochDirection{std::numbers::pi / 2.0, 2.0 * theta}};
}

AtomBasis AtomBasis::linear(double theta) {
    return {BlochDirection{std::numbers::pi / 2.0, 2.0 * theta}};
}

MeasurementSetting correlated_setting(Basis basis) {
    constexpr double pi = std::numbers::pi;
    switch (basis) {
    case Basis::X:
        return {PhotonBasis::linear(0.0), AtomBasis::linear(0.0)};
    case Basis::Y:
        return {PhotonBasis::linear(-pi / 4.0), AtomBasis::linear(pi / 4.0)};
    case Basis::Z:
        return {PhotonBasis::circular(), AtomBasis::z()};
    }
    throw ParameterError("unknown basis");
}

AtomPhotonState::AtomPhotonState(const Matrix6& rho) : rho_(rho) {
    if (!rho_.allFinite()) {
        throw ParameterError("density matrix has non-finite entries");
    }
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > Tolerance::hermitian) {
        throw ParameterError("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    }
    if (std::abs(trace() - 1.0) > Tolerance::trace) {
        throw ParameterError("density matrix trace is " + std::to_string(trace()));
    }
    if (min_eigenvalue() < Tolerance::psd) {
        throw ParameterError("density matrix is not positive semidefinite");
    }
}

double AtomPhotonState::trace() const { return rho_.trace().real(); }

double AtomPhotonState::purity() const { return (rho_ * rho_).trace().real(); }

double AtomPhotonState::leakage_population() const {
    return rho_(joint_index(kAtomLeak, 0), joint_index(kAtomLeak, 0)).real() +
           rho_(joint_index(kAtomLeak, 1), joint_index(kAtomLeak, 1)).real();
}

double AtomPhotonState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix6> solver(rho_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

AtomPhotonState AtomPhotonState::atom_marginal_with_mixed_photon() const {
    Matrix6 out = Matrix6::Zero();
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const Complex reduced = rho_(joint_index(a, 0), joint_index(b, 0)) + rho_(joint_index(a, 1), joint_index(b, 1));
            out(joint_index(a, 0), joint_index(b, 0)) = 0.5 * reduced;
            out(joint_index(a, 1), joint_index(b, 1)) = 0.5 * reduced;
        }
    }
    return AtomPhotonState(out);
}

AtomPhotonState ideal_entangled_state() {
    Matrix6 rho = Matrix6::Zero();
    const int dl = joint_index(kAtomDown, kPhotonL);
    const int ur = joint_index(kAtomUp, kPhotonR);
    rho(dl, dl) = 0.5;
    rho(ur, ur) = 0.5;
    rho(dl, ur) = 0.5;
    rho(ur, dl) = 0.5;
    return AtomPhotonState(rho);
}

AtomPhotonState apply_dephasing(const AtomPhotonState& state, double visibility_factor) {
    detail::require_probability(visibility_factor, "dephasing visibility factor");
    // Phase noise on up_z: every coherence with exactly one up_z index shrinks.
    Matrix6 rho = state.rho();
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if ((i / 2 == kAtomUp) != (j / 2 == kAtomUp)) {
                rho(i, j) *= visibility_factor;
            }
        }
    }
    return AtomPhotonState(rho);
}

AtomPhotonState apply_larmor(const AtomPhotonState& state, double phi) {
    if (!std::isfinite(phi)) {
        throw ParameterError("Larmor angle must be finite");
    }
    // U = diag over atom levels (1, e^{i phi}, 1) (x) I.
    std::array<Complex, 3> phase{Complex{1.0, 0.0}, std::polar(1.0, phi), Complex{1.0, 0.0}};
    Matrix6 rho = state.rho();
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            rho(i, j) *= phase[static_cast<std::size_t>(i / 2)] * std::conj(phase[static_cast<std::size_t>(j / 2)]);
        }
    }
    // Restore exact Hermiticity after the complex multiplications.
    const Matrix6 sym = 0.5 * (rho + rho.adjoint());
    return AtomPhotonState(sym);
}

AtomPhotonState mix_uncorrelated_noise(const AtomPhotonState& state, double p_noise) {
    detail::require_probability(p_noise, "noise probability");
    const Matrix6 rho = (1.0 - p_noise) * state.rho() + p_noise * state.atom_marginal_with_mixed_photon().rho();
    return AtomPhotonState(rho);
}

AtomPhotonState apply_transfer_loss(const AtomPhotonState& state, double efficiency, double blocked_leak) {
    detail::require_probability(efficiency, "transfer efficiency");
    detail::require_probability(blocked_leak, "blocked-state leakage");
    // Kraus operators on the atom (x) I_photon:
    //   K0 = diag(sqrt(1-b), sqrt(eta), 1)
    //   K1 = sqrt(1-eta) |leak><up|,  K2 = sqrt(b) |leak><down|
    const std::array<double, 3> keep{std::sqrt(1.0 - blocked_leak), std::sqrt(efficiency), 1.0};
    const Matrix6& in = state.rho();
    Matrix6 out = Matrix6::Zero();
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            out(i, j) = keep[static_cast<std::size_t>(i / 2)] * keep[static_cast<std::size_t>(j / 2)] * in(i, j);
        }
    }
    const double lose_up = 1.0 - efficiency;
    const double lose_down = blocked_leak;
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            const int lp = joint_index(kAtomLeak, p);
            const int lq = joint_index(kAtomLeak, q);
            out(lp, lq) += lose_up * in(joint_index(kAtomUp, p), joint_index(kAtomUp, q));
            out(lp, lq) += lose_down * in(joint_index(kAtomDown, p), joint_index(kAtomDown, q));
        }
    }
    return AtomPhotonState(out);
}

OutcomeTable outcome_probabilities(const AtomPhotonState& state, const MeasurementSetting& setting) {
    if (!finite(setting.photon.direction) || !finite(setting.atom.direction)) {
        throw ParameterError("measurement angles must be finite");
    }
    const std::array<Vector2, 2> photon{plus_state(setting.photon.direction), minus_state(setting.photon.direction)};
    const std::array<Vector2, 2> atom{plus_state(setting.atom.direction), minus_state(setting.atom.direction)};
    const Matrix6& rho = state.rho();

    OutcomeTable table;
    for (std::size_t ph = 0; ph < 2; ++ph) {
        for (std::size_t at = 0; at < 2; ++at) {
            // |v> = |atom_at> (x) |photon_ph>, embedded in the qubit block of the atom.
            Eigen::Matrix<Complex, 6, 1> v = Eigen::Matrix<Complex, 6, 1>::Zero();
            for (int a = 0; a < 2; ++a) {
                for (int p = 0; p < 2; ++p) {
                    v(joint_index(a, p)) = atom[at](a) * photon[ph](p);
                }
            }
            table.p[ph][at] = std::max(0.0, (v.adjoint() * rho * v)(0, 0).real());
        }
        // Leakage is measurement-inert on the atom side.
        Eigen::Matrix<Complex, 6, 1> v = Eigen::Matrix<Complex, 6, 1>::Zero();
        for (int p = 0; p < 2; ++p) {
            v(joint_index(kAtomLeak, p)) = photon[ph](p);
        }
        table.p[ph][2] = std::max(0.0, (v.adjoint() * rho * v)(0, 0).real());
    }
    return table;
}

double correlator(const AtomPhotonState& state, const MeasurementSetting& setting) {
    return outcome_probabilities(state, setting).correlator();
}

double chsh_s(const AtomPhotonState& state, std::span<const MeasurementSetting, 4> settings) {
    const double e1 = correlator(state, settings[0]);
    const double e2 = correlator(state, settings[1]);
    const double e3 = correlator(state, settings[2]);
    const double e4 = correlator(state, settings[3]);
    return std::abs(e1 + e2 + e3 - e4);
}

std::array<MeasurementSetting, 4> optimal_chsh_settings() {
    constexpr double pi = std::numbers::pi;
    const PhotonBasis b = PhotonBasis::linear(0.0);
    const PhotonBasis b2 = PhotonBasis::linear(pi / 4.0);
    const AtomBasis a = AtomBasis::linear(-pi / 8.0);
    const AtomBasis a2 = AtomBasis::linear(pi / 8.0);
    return {MeasurementSetting{b, a}, MeasurementSetting{b2, a}, MeasurementSetting{b, a2}, MeasurementSetting{b2, a2}};
}

double fidelity_to_ideal(const AtomPhotonState& state) {
    Eigen::Matrix<Complex, 6, 1> psi = Eigen::Matrix<Complex, 6, 1>::Zero();
    psi(joint_index(kAtomDown, kPhotonL)) = 1.0 / std::sqrt(2.0);
    psi(joint_index(kAtomUp, kPhotonR)) = 1.0 / std::sqrt(2.0);
    return (psi.adjoint() * state.rho() * psi)(0, 0).real();
}

} // namespace atomlink::qstate
