#pragma once

// Reference implementations used only by the tests. They are written from
// first principles (explicit Kraus sums, Pauli operators, full Hamiltonians)
// and share no code with the library.

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "atomlink/raman.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix<Complex, 2, 2>;
using Matrix3 = Eigen::Matrix<Complex, 3, 3>;
using Matrix6 = Eigen::Matrix<Complex, 6, 6>;

/// A (x) P with the atom as the slow index.
Matrix6 kron(const Matrix3& atom, const Matrix2& photon);

/// (|down,L> + |up,R>)/sqrt(2) built from kets.
Matrix6 ideal_rho();

/// Ginibre-distributed density matrix of the given rank (1..6).
Matrix6 random_density(std::mt19937_64& gen, int rank);

/// n.sigma for the Bloch vector (polar, azimuth).
Matrix2 pauli_dot(double polar, double azimuth);

/// Tr[rho (A (x) B)] on the qubit block minus the leakage population.
double correlator(const Matrix6& rho, double atom_polar, double atom_azimuth, double photon_polar, double photon_azimuth);

Matrix6 kraus_sum(const Matrix6& rho, const std::vector<Matrix3>& atom_kraus);

/// Random up_z phase flip with probability (1-v)/2.
Matrix6 dephasing(const Matrix6& rho, double v);
Matrix6 larmor(const Matrix6& rho, double phi);
Matrix6 transfer_loss(const Matrix6& rho, double eta, double blocked);
/// (1-p) rho + p Tr_photon(rho) (x) I/2.
Matrix6 uncorrelated_noise(const Matrix6& rho, double p);

/// Ground-state energy (MHz) from diagonalizing the full 8x8 hyperfine plus
/// Zeeman Hamiltonian in the |mJ, mI> basis.
double breit_rabi_energy(int f, int m, double b_gauss);

enum class Propagator { Exact, Rk4 };

/// Population transferred to |2,+1> (three-level) or |2,-1> (four-level)
/// after the pulse, from the full multi-level Schrodinger equation.
double raman_transfer(const atomlink::raman::RamanConfig& cfg, atomlink::raman::Scheme scheme,
                      Propagator method = Propagator::Exact, double rk4_step_us = 1e-6);

} // namespace oracle
