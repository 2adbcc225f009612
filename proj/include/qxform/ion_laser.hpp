#pragma once

// Trapped-ion Hamiltonians (single ion with a time-dependent trap, many ions
// sharing one mode, one ion vibrating in two dimensions) and the unitary
// frame changes that linearize them.
//
// Layouts: Qubit (x) Fock for one ion, Qubit^J (x) Fock for J ions,
// Qubit (x) Fock_x (x) Fock_y in two dimensions. A_12 = |g><e| = sigma_-,
// A_22 - A_11 = sigma_z.

#include "qxform/ermakov.hpp"
#include "qxform/fock.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace qxform {

struct IonLaserParams {
  double nu0 = 1.0;
  double omega21 = 0.0;
  double omega_laser = 0.0;
  double delta = 0.0;
  double rabi = 1.0;  // Omega = lambda * E0
  double eta0 = 0.1;
  std::optional<double> k_wave;
  std::size_t n_fock = 32;

  // delta == omega21 - omega_laser, eta0 == k sqrt(1 / (2 nu0)) when k is
  // given, n_fock >= 4.
  void validate() const;
};

struct ManyIonParams {
  double nu = 1.0;
  double delta = 0.0;
  std::vector<double> rabis;
  std::vector<double> etas;
  std::size_t n_fock = 24;

  void validate() const;
  std::size_t ions() const { return rabis.size(); }
};

struct TwoDParams {
  double nu_x = 1.0;
  double nu_y = 1.0;
  double delta = 0.0;
  double rabi = 1.0;
  double eta_x = 0.1;
  double eta_y = 0.1;
  std::size_t n_x = 12;
  std::size_t n_y = 12;

  void validate() const;
};

// Comparison of a printed closed form against brute-force conjugation.
struct LinearizationReport {
  ComplexMatrix claimed;
  ComplexMatrix computed;
  // Max entrywise |computed - claimed - offset * 1| over the guarded block.
  double max_residual = 0.0;
  double constant_offset = 0.0;
  // Max distance between sorted spectra of T H T^dagger and H.
  double spectrum_distance = 0.0;
  // Many ions only: least-squares coefficient c of the dipole term.
  std::optional<double> fitted_dipole_coefficient;
};

struct LinearizeOptions {
  // Fock levels excluded at the top of every mode when comparing entries.
  std::size_t guard = 2;
  // Extra Fock levels used internally for the conjugation before the result
  // is cut back to the working truncation.
  std::size_t pad = 16;
};

// Frozen-instant rotating-frame Hamiltonian
//   omega_tilde (n + 1/2) + delta A_22 + Omega [e^{-i eta (a + a^dag)} A_12 + h.c.].
ComplexMatrix h_single_rotating(const IonLaserParams& p, double eta_t, double omega_tilde);

// Interaction-picture Hamiltonian for delta == 0, with the oscillator phase
// integral accumulated from the Ermakov solution.
ComplexMatrix h_single_interaction(const IonLaserParams& p, const ErmakovSolution& sol, double t);

// T_omega = exp(-i omega t A_22) on Qubit (x) Fock(n).
ComplexMatrix rotating_frame(double omega, double t, std::size_t n_fock);

// T(t) = exp(i ln(rho sqrt(nu0)) (x p + p x) / 2) exp(-i rho_dot / (2 rho) x^2) on Fock(n).
ComplexMatrix ermakov_frame(const ErmakovSolution& sol, double t, std::size_t n_fock);

// R = exp(pi/4 (sigma_+ - sigma_-)) exp(-i eta/2 (a + a^dag) sigma_z) on Qubit (x) Fock(n).
ComplexMatrix linearizer_single(double eta, std::size_t n_fock);

// Right-hand side of the linearized equation as printed:
//   omega_tilde n + Omega sigma_z + (delta/2 + i[a beta - a^dag beta*]) sigma_x.
ComplexMatrix h_single_linearized(const IonLaserParams& p, double omega_tilde, std::complex<double> beta_t);

LinearizationReport linearize_single(const IonLaserParams& p, const ErmakovSolution& sol, double t,
                                     const LinearizeOptions& opt = {});

ComplexMatrix h_many(const ManyIonParams& p);
ComplexMatrix linearizer_many(const ManyIonParams& p);
LinearizationReport linearize_many(const ManyIonParams& p, const LinearizeOptions& opt = {});

ComplexMatrix h_2d(const TwoDParams& p);
ComplexMatrix linearizer_2d(const TwoDParams& p);
LinearizationReport linearize_2d(const TwoDParams& p, const LinearizeOptions& opt = {});

// Sign convention for the eta_dot part of beta(t) in the linearized
// generator. Printed uses beta = eta omega/2 - i eta_dot/2; Conjugated flips
// the imaginary part.
enum class BetaConvention { Printed, Conjugated };

struct DynamicsSample {
  double t = 0.0;
  double infidelity = 0.0;
  // Population in the top `guard` Fock levels, max over both frames.
  double leakage = 0.0;
};

struct DynamicsOptions {
  std::size_t steps = 200;  // per output interval
  BetaConvention convention = BetaConvention::Printed;
  std::size_t guard = 2;
  double convergence_tol = 1e-6;
};

// Propagates phi under the rotating-frame Hamiltonian and psi = R phi under
// the linearized one, reporting 1 - |<psi|R|phi>|^2 at each requested time.
// psi0 is phi at sol.t_begin().
std::vector<DynamicsSample> dynamics_series(const IonLaserParams& p, const ErmakovSolution& sol,
                                            const StateVector& psi0, const std::vector<double>& times,
                                            const DynamicsOptions& opt = {});

double dynamics_equivalence(const IonLaserParams& p, const ErmakovSolution& sol, const StateVector& psi0,
                            double t_final, std::size_t steps, BetaConvention convention = BetaConvention::Printed);

// Keeps the first small_dims[k] levels of every factor.
ComplexMatrix restrict_factors(const ComplexMatrix& m, const std::vector<std::size_t>& big_dims,
                               const std::vector<std::size_t>& small_dims);

}  // namespace qxform
