#pragma once

// Lossy Kerr oscillator
//   d rho/dt = -i chi [n^2, rho] + 2 gamma a rho a^dag - gamma (n rho + rho n)
// solved in closed form in the Fock basis and, independently, by RK4.

#include "qxform/fock.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qxform {

struct KerrParams {
  double chi = 0.0;
  double gamma = 0.0;
  std::size_t n_fock = 16;

  void validate() const;
};

// J rho = 2 gamma a rho a^dag         L rho = -gamma (n rho + rho n)
// Y rho = -i chi (n^2 rho - rho n^2)  R rho = 2 (n rho - rho n)
enum class Superop { J, L, Y, R };

ComplexMatrix apply_superop(Superop tag, const KerrParams& p, const ComplexMatrix& rho);

struct SuperopCommutatorResidual {
  // max || (YJ - JY) rho - c i chi R J rho ||
  double yj = 0.0;
  // max || (RJ - JR) rho ||
  double rj = 0.0;
  double max() const { return yj > rj ? yj : rj; }
};

// c = 2 is the relation as usually quoted. On a dyad |n><m| the left side is
// 2 i chi (n - m) J while R J gives 2 (n - m) J, so only c = 1 is an identity
// for R = 2 [n, .]; c = 1 is also what exp(-i chi R t) J in the rotated
// equation requires.
SuperopCommutatorResidual superop_commutator_check(const KerrParams& p, std::span<const ComplexMatrix> samples,
                                                   double c = 2.0);

// Fock-basis closed form, evaluated on any operator (it is linear in rho0).
// The k-sum stops at the truncation; the output dyad is |n><m|.
ComplexMatrix analytic_solution(const KerrParams& p, const ComplexMatrix& rho0, double t);
DensityMatrix analytic_solution(const KerrParams& p, const DensityMatrix& rho0, double t);

// 2 gamma (1 - exp(-c t)) / c with c = 2 i chi (n - m) + 2 gamma, and its
// limit 2 gamma t as c -> 0.
std::complex<double> gain_factor(const KerrParams& p, long n_minus_m, double t);

struct LindbladResult {
  ComplexMatrix rho;
  // Largest anti-Hermitian part removed by re-symmetrization in one step.
  double max_hermiticity_drift = 0.0;
  double min_eigenvalue = 0.0;
};

// Right-hand side of the master equation.
ComplexMatrix lindblad_rhs(const KerrParams& p, const ComplexMatrix& rho);

// Fixed-step RK4 on the matrix ODE with steps * max(|chi| N^2, gamma N) * dt <= 0.1.
LindbladResult lindblad_integrate(const KerrParams& p, const ComplexMatrix& rho0, double t, std::size_t steps);

struct KerrCompareRow {
  double t = 0.0;
  double max_abs_diff = 0.0;
  double trace_analytic = 0.0;
  double trace_rk4 = 0.0;
  double min_eig_analytic = 0.0;
  double hermiticity_analytic = 0.0;
  double min_eig_rk4 = 0.0;
};

// RK4 is chained between consecutive times with `steps_per_interval` steps.
std::vector<KerrCompareRow> compare(const KerrParams& p, const ComplexMatrix& rho0, const std::vector<double>& times,
                                    std::size_t steps_per_interval);

// Expectation <a> = tr(a rho).
std::complex<double> mean_amplitude(const ComplexMatrix& rho);

}  // namespace qxform
