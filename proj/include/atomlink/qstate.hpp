#pragma once

// Atom-photon density matrix on (atom qutrit) x (photon polarization qubit).
//
// Basis ordering is fixed so matrices compare bit-for-bit across tools:
//   atom:   0 = |F=1,mF=-1> (down_z), 1 = |F=1,mF=+1> (up_z), 2 = |F=1,mF=0> (leakage)
//   photon: 0 = |L>, 1 = |R>
//   joint index = 2*atom + photon
//
// Measurement directions are Bloch vectors on the {down,up} and {L,R} spheres;
// the "+" eigenvector is cos(polar/2)|0> + e^{i azimuth} sin(polar/2)|1>.

#include <array>
#include <complex>
#include <span>

#include <Eigen/Dense>

namespace atomlink::qstate {

using Complex = std::complex<double>;
using Matrix6 = Eigen::Matrix<Complex, 6, 6>;

inline constexpr int kAtomDown = 0;
inline constexpr int kAtomUp = 1;
inline constexpr int kAtomLeak = 2;
inline constexpr int kPhotonL = 0;
inline constexpr int kPhotonR = 1;

constexpr int joint_index(int atom, int photon) { return 2 * atom + photon; }

struct BlochDirection {
    double polar = 0.0;
    double azimuth = 0.0;

    bool operator==(const BlochDirection&) const = default;
};

/// Photon analysis basis: circular eigenbasis {L,R} or a linear polarizer at
/// angle theta (rad). A linear polarizer at theta sits at Bloch azimuth 2*theta.
struct PhotonBasis {
    static PhotonBasis circular() { return {BlochDirection{0.0, 0.0}}; }
    static PhotonBasis linear(double theta);

    BlochDirection direction;
};

/// Atom analysis direction. `linear(theta)` mirrors the readout-polarization
/// angle convention: theta = 0 is X, 45 deg is Y, 90 deg is -X.
struct AtomBasis {
    static AtomBasis z() { return {BlochDirection{0.0, 0.0}}; }
    static AtomBasis linear(double theta);

    BlochDirection direction;
};

struct MeasurementSetting {
    PhotonBasis photon;
    AtomBasis atom;
};

enum class Basis { X, Y, Z };

/// Settings for which the ideal state gives E = +1.
MeasurementSetting correlated_setting(Basis basis);

/// Joint outcome probabilities. Index [photon][atom] with photon 0 = "+", 1 = "-",
/// atom 0 = "+", 1 = "-", 2 = leakage.
struct OutcomeTable {
    std::array<std::array<double, 3>, 2> p{};

    double same() const { return p[0][0] + p[1][1]; }
    double different() const { return p[0][1] + p[1][0] + p[0][2] + p[1][2]; }
    double correlator() const { return same() - different(); }
};

class AtomPhotonState {
public:
    /// Validates the density-matrix invariants.
    explicit AtomPhotonState(const Matrix6& rho);

    const Matrix6& rho() const { return rho_; }
    Complex operator()(int i, int j) const { return rho_(i, j); }

    double trace() const;
    double purity() const;
    double leakage_population() const;
    double min_eigenvalue() const;

    /// Atom reduced state embedded back with a maximally mixed photon.
    AtomPhotonState atom_marginal_with_mixed_photon() const;

    struct Tolerance {
        static constexpr double hermitian = 1e-12;
        static constexpr double trace = 1e-12;
        static constexpr double psd = -1e-10;
    };

private:
    Matrix6 rho_;
};

AtomPhotonState ideal_entangled_state();

/// Random phase on up_z: coherences between up_z and the other atomic levels
/// are multiplied by v (z-basis dephasing).
AtomPhotonState apply_dephasing(const AtomPhotonState& state, double visibility_factor);

/// Relative phase e^{i phi} on up_z versus down_z.
AtomPhotonState apply_larmor(const AtomPhotonState& state, double phi);

/// rho' = (1-p) rho + p (atom marginal (x) I/2).
AtomPhotonState mix_uncorrelated_noise(const AtomPhotonState& state, double p_noise);

/// Incoherent transfer loss: with probability 1-efficiency the up_z population
/// leaks to mF=0, and with probability blocked_leak the down_z population does.
AtomPhotonState apply_transfer_loss(const AtomPhotonState& state, double efficiency, double blocked_leak = 0.0);

OutcomeTable outcome_probabilities(const AtomPhotonState& state, const MeasurementSetting& setting);

double correlator(const AtomPhotonState& state, const MeasurementSetting& setting);

/// S = |E1 + E2 + E3 - E4|.
double chsh_s(const AtomPhotonState& state, std::span<const MeasurementSetting, 4> settings);

/// Settings reaching 2*sqrt(2) for the ideal state.
std::array<MeasurementSetting, 4> optimal_chsh_settings();

/// |<Psi|rho|Psi>| with Psi the ideal entangled state.
double fidelity_to_ideal(const AtomPhotonState& state);

} // namespace atomlink::qstate
