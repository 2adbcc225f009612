#include "qxform/slow_atom.hpp"

#include "qxform/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qxform {

namespace {

constexpr double kLeakageLimit = 1e-10;

// Internal (qubit (x) Fock) space operators, embedded with identity on the grid.
ComplexMatrix on_internal(const SlowAtomSystem& sys, const ComplexMatrix& op) {
  return kron(identity(sys.grid.points), op);
}

ComplexMatrix sqrt_n_plus_one(std::size_t n) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = std::sqrt(static_cast<double>(k + 1));
  return m;
}

ComplexMatrix profile(const SlowAtomSystem& sys) {
  const auto xs = grid_points(sys.grid);
  ComplexMatrix g = ComplexMatrix::Zero(xs.size(), xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) g(j, j) = mode_value(sys.mode, xs[j]);
  return g;
}

ComplexMatrix kinetic_half(const SlowAtomSystem& sys) {
  return kron(0.5 * kinetic_operator(sys.grid, sys.kinetic), identity(2 * sys.n_fock));
}

void require_state(const SlowAtomSystem& sys, const StateVector& psi) {
  if (psi.dim() != sys.layout().dim()) fail(ErrorKind::Layout, "state does not match Grid (x) Qubit (x) Fock layout");
}

}  // namespace

void SlowAtomSystem::validate() const {
  if (grid.points != 1 && grid.points < 8) fail(ErrorKind::InvalidDimension, "grid needs at least 8 points");
  if (!(grid.length > 0.0)) fail(ErrorKind::Parameter, "grid length must be positive");
  if (n_fock < 2) fail(ErrorKind::InvalidDimension, "n_fock must be >= 2");
  if (std::abs(omega - omega0) > 1e-12 * std::max(1.0, std::abs(omega)))
    fail(ErrorKind::Unsupported, "interaction picture requires resonance omega == omega0");
  if (const auto* gm = std::get_if<GaussianMode>(&mode); gm && !(gm->width > 0.0))
    fail(ErrorKind::Parameter, "Gaussian mode width must be positive");
  if (grid.points * 2 * n_fock > kMaxDim) fail(ErrorKind::Layout, "M * 2 * N exceeds memory guard");
}

HilbertLayout SlowAtomSystem::layout() const {
  return HilbertLayout({Grid{grid.points, grid.length}, Qubit{}, FockMode{n_fock}});
}

std::vector<double> grid_points(const GridSpec& grid) {
  std::vector<double> xs(grid.points);
  const double h = grid.length / static_cast<double>(grid.points);
  for (std::size_t j = 0; j < grid.points; ++j) xs[j] = h * static_cast<double>(j);
  return xs;
}

double mode_value(const ModeShape& mode, double x) {
  if (const auto* c = std::get_if<ConstantMode>(&mode)) return c->g0;
  if (const auto* s = std::get_if<SinusoidalMode>(&mode)) return s->g0 * std::cos(s->k_mode * x);
  const auto& g = std::get<GaussianMode>(mode);
  const double d = (x - g.x_center) / g.width;
  return g.g0 * std::exp(-0.5 * d * d);
}

ComplexMatrix kinetic_operator(const GridSpec& grid, KineticScheme scheme) {
  const std::size_t m = grid.points;
  ComplexMatrix p2 = ComplexMatrix::Zero(m, m);
  if (m == 1) return p2;
  if (scheme == KineticScheme::FiniteDifference) {
    const double h = grid.length / static_cast<double>(m);
    const double c = 1.0 / (h * h);
    for (std::size_t j = 0; j < m; ++j) {
      p2(j, j) = 2.0 * c;
      p2(j, (j + 1) % m) -= c;
      p2(j, (j + m - 1) % m) -= c;
    }
    return p2;
  }
  // (p^2)_{jl} = (1/M) sum_m k_m^2 exp(i k_m (x_j - x_l)); real for the
  // symmetric wavenumber set, including the Nyquist term.
  const double dk = 2.0 * std::numbers::pi / grid.length;
  const double h = grid.length / static_cast<double>(m);
  const auto half = static_cast<long>(m / 2);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l) {
      const double dx = h * (static_cast<double>(j) - static_cast<double>(l));
      double acc = 0.0;
      for (long q = -half; q < static_cast<long>(m) - half; ++q) {
        const double k = dk * static_cast<double>(q);
        acc += k * k * std::cos(k * dx);
      }
      p2(j, l) = acc / static_cast<double>(m);
    }
  }
  return p2;
}

ComplexMatrix lowering_shift(std::size_t n) {
  if (n < 2) fail(ErrorKind::InvalidDimension, "Fock dimension must be >= 2");
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k + 1 < n; ++k) v(k, k + 1) = 1.0;
  return v;
}

ComplexMatrix nonunitary_transform(const SlowAtomSystem& sys) {
  sys.validate();
  const std::size_t n = sys.n_fock;
  const ComplexMatrix excited = 0.5 * (identity(2) + pauli(Pauli::Z));
  const ComplexMatrix ground = 0.5 * (identity(2) - pauli(Pauli::Z));
  return on_internal(sys, kron(excited, identity(n)) + kron(ground, lowering_shift(n)));
}

ComplexMatrix ground_vacuum_projector(const SlowAtomSystem& sys) {
  sys.validate();
  ComplexMatrix internal = ComplexMatrix::Zero(2 * sys.n_fock, 2 * sys.n_fock);
  internal(sys.n_fock, sys.n_fock) = 1.0;  // |g> (x) |0>
  return on_internal(sys, internal);
}

ComplexMatrix h_interaction(const SlowAtomSystem& sys) {
  sys.validate();
  const ComplexMatrix a = annihilation(sys.n_fock);
  const ComplexMatrix jc = kron(pauli(Pauli::Plus), a) + kron(pauli(Pauli::Minus), a.adjoint());
  return kinetic_half(sys) + kron(profile(sys), jc);
}

ComplexMatrix effective_generator(const SlowAtomSystem& sys) {
  sys.validate();
  return kinetic_half(sys) + kron(profile(sys), kron(pauli(Pauli::X), sqrt_n_plus_one(sys.n_fock)));
}

ComplexMatrix factorized_propagator(const SlowAtomSystem& sys, double t) {
  if (!(t >= 0.0)) fail(ErrorKind::Parameter, "time must be >= 0");
  const ComplexMatrix tr = nonunitary_transform(sys);
  const ComplexMatrix proj = ground_vacuum_projector(sys);
  const ComplexMatrix inner = tr.adjoint() * evolution_operator(effective_generator(sys), t) * tr + proj;
  return inner * evolution_operator(kinetic_half(sys) * proj, t);
}

ComplexMatrix direct_propagator(const SlowAtomSystem& sys, double t) {
  if (!(t >= 0.0)) fail(ErrorKind::Parameter, "time must be >= 0");
  return expm(-kI * t * h_interaction(sys));
}

double top_level_population(const SlowAtomSystem& sys, const StateVector& psi) {
  require_state(sys, psi);
  const auto& v = psi.amplitudes();
  const std::size_t n = sys.n_fock;
  double pop = 0.0;
  for (std::size_t block = 0; block < sys.grid.points * 2; ++block) pop += std::norm(v(block * n + n - 1));
  return pop;
}

StateVector propagate(const SlowAtomSystem& sys, const StateVector& psi0, double t) {
  sys.validate();
  require_state(sys, psi0);
  const double leak = top_level_population(sys, psi0);
  if (!(leak < kLeakageLimit))
    fail(ErrorKind::Truncation, "initial state populates the top Fock level (" + std::to_string(leak) + ")");
  return StateVector(factorized_propagator(sys, t) * psi0.amplitudes());
}

double compare_oracle(const SlowAtomSystem& sys, const StateVector& psi0, double t) {
  sys.validate();
  require_state(sys, psi0);
  const double leak = top_level_population(sys, psi0);
  if (!(leak < kLeakageLimit))
    fail(ErrorKind::Truncation, "initial state populates the top Fock level (" + std::to_string(leak) + ")");
  const ComplexVector diff = (factorized_propagator(sys, t) - direct_propagator(sys, t)) * psi0.amplitudes();
  return diff.norm();
}

InternalPopulations populations(const SlowAtomSystem& sys, const StateVector& psi) {
  require_state(sys, psi);
  const auto& v = psi.amplitudes();
  const std::size_t n = sys.n_fock;
  InternalPopulations out;
  for (std::size_t j = 0; j < sys.grid.points; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      out.excited += std::norm(v((j * 2 + 0) * n + k));
      out.ground += std::norm(v((j * 2 + 1) * n + k));
    }
  }
  return out;
}

StateVector gaussian_packet_state(const SlowAtomSystem& sys, Internal internal, std::size_t level, double x_center,
                                  double width, double k0) {
  sys.validate();
  if (level >= sys.n_fock) fail(ErrorKind::Parameter, "Fock level outside truncation");
  if (!(width > 0.0)) fail(ErrorKind::Parameter, "packet width must be positive");
  const auto xs = grid_points(sys.grid);
  const std::size_t n = sys.n_fock;
  const std::size_t q = internal == Internal::Excited ? 0 : 1;
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(sys.layout().dim()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    // Nearest periodic image of x - x_center.
    double d = std::remainder(xs[j] - x_center, sys.grid.length);
    v((j * 2 + q) * n + level) = std::exp(-d * d / (4.0 * width * width)) * std::exp(kI * k0 * xs[j]);
  }
  return StateVector(std::move(v));
}

StateVector plane_wave_state(const SlowAtomSystem& sys, Internal internal, std::size_t level, int m) {
  sys.validate();
  if (level >= sys.n_fock) fail(ErrorKind::Parameter, "Fock level outside truncation");
  const auto xs = grid_points(sys.grid);
  const std::size_t n = sys.n_fock;
  const std::size_t q = internal == Internal::Excited ? 0 : 1;
  const double k = 2.0 * std::numbers::pi * m / sys.grid.length;
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(sys.layout().dim()));
  for (std::size_t j = 0; j < xs.size(); ++j) v((j * 2 + q) * n + level) = std::exp(kI * k * xs[j]);
  return StateVector(std::move(v));
}

}  // namespace qxform
