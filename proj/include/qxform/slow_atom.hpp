#pragma once

// A slow two-level atom crossing a cavity mode, on a periodic position grid.
// Layout: Grid(M) (x) Qubit (x) Fock(N). Atom mass is 1, and the resonant
// interaction picture removes the free field and atom energies.
//
// The non-unitary map T = |e><e| (x) 1 + |g><g| (x) V, with V the one-sided
// lowering shift, turns the Jaynes-Cummings coupling into g(x) sigma_x
// sqrt(n + 1), which commutes with the field number operator.

#include "qxform/fock.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace qxform {

struct GridSpec {
  std::size_t points = 32;
  double length = 6.283185307179586;
};

struct ConstantMode {
  double g0;
};
// g0 cos(k x)
struct SinusoidalMode {
  double g0;
  double k_mode;
};
// g0 exp(-(x - x_center)^2 / (2 width^2))
struct GaussianMode {
  double g0;
  double x_center;
  double width;
};
using ModeShape = std::variant<ConstantMode, SinusoidalMode, GaussianMode>;

enum class KineticScheme { Spectral, FiniteDifference };

struct SlowAtomSystem {
  GridSpec grid;
  ModeShape mode = SinusoidalMode{0.5, 1.0};
  std::size_t n_fock = 4;
  double omega = 1.0;
  double omega0 = 1.0;
  KineticScheme kinetic = KineticScheme::Spectral;

  // Grid has >= 8 points (a single point is accepted for the pure
  // Jaynes-Cummings limit), field and atom are resonant.
  void validate() const;
  HilbertLayout layout() const;
};

std::vector<double> grid_points(const GridSpec& grid);
double mode_value(const ModeShape& mode, double x);

// p^2 on the grid: Fourier multiplier (2 pi m / L)^2 with signed m, or the
// periodic second-order central difference.
ComplexMatrix kinetic_operator(const GridSpec& grid, KineticScheme scheme = KineticScheme::Spectral);

// V = sum_{n=0}^{N-2} |n><n+1|
ComplexMatrix lowering_shift(std::size_t n);

// Full-layout operators.
ComplexMatrix nonunitary_transform(const SlowAtomSystem& sys);
ComplexMatrix ground_vacuum_projector(const SlowAtomSystem& sys);
ComplexMatrix h_interaction(const SlowAtomSystem& sys);
// p^2/2 + g(x) sigma_x sqrt(n + 1)
ComplexMatrix effective_generator(const SlowAtomSystem& sys);

// [T^dag exp(-i K t) T + P_gv] exp(-i (p^2/2) P_gv t)
ComplexMatrix factorized_propagator(const SlowAtomSystem& sys, double t);
// expm(-i H_I t)
ComplexMatrix direct_propagator(const SlowAtomSystem& sys, double t);

StateVector propagate(const SlowAtomSystem& sys, const StateVector& psi0, double t);
// || (U_factorized - U_direct) psi0 ||
double compare_oracle(const SlowAtomSystem& sys, const StateVector& psi0, double t);

struct InternalPopulations {
  double excited = 0.0;
  double ground = 0.0;
};
InternalPopulations populations(const SlowAtomSystem& sys, const StateVector& psi);

// Population of the top Fock level.
double top_level_population(const SlowAtomSystem& sys, const StateVector& psi);

enum class Internal { Excited, Ground };

// internal (x) |level> (x) normalized Gaussian packet exp(-(x-x0)^2/(4 w^2) + i k0 x)
StateVector gaussian_packet_state(const SlowAtomSystem& sys, Internal internal, std::size_t level, double x_center,
                                  double width, double k0 = 0.0);
// internal (x) |level> (x) exp(i 2 pi m x / L)
StateVector plane_wave_state(const SlowAtomSystem& sys, Internal internal, std::size_t level, int m);

}  // namespace qxform
