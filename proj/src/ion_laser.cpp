#include "qxform/ion_laser.hpp"

#include "qxform/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qxform {

namespace {

ComplexMatrix quadrature_sum(std::size_t n) {
  const ComplexMatrix a = annihilation(n);
  return a + a.adjoint();
}

// exp(pi/4 (sigma_+ - sigma_-)) on one qubit; maps sigma_z -> -sigma_x and sigma_x -> sigma_z.
ComplexMatrix quarter_rotation() { return expm(std::numbers::pi / 4.0 * (pauli(Pauli::Plus) - pauli(Pauli::Minus))); }

std::vector<Eigen::Index> flat_indices(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& keep) {
  std::size_t total = 1;
  for (auto k : keep) total *= k;
  std::vector<Eigen::Index> out;
  out.reserve(total);
  std::vector<std::size_t> digit(dims.size(), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t flat = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) flat = flat * dims[f] + digit[f];
    out.push_back(static_cast<Eigen::Index>(flat));
    for (std::size_t f = dims.size(); f-- > 0;) {
      if (++digit[f] < keep[f]) break;
      digit[f] = 0;
    }
  }
  return out;
}

ComplexMatrix select(const ComplexMatrix& m, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(idx[i], idx[j]);
  return out;
}

// Indices below the guard band of every Fock factor.
std::vector<Eigen::Index> guarded(const std::vector<std::size_t>& dims, const std::vector<bool>& is_fock,
                                  std::size_t guard) {
  std::vector<std::size_t> keep(dims.size());
  for (std::size_t f = 0; f < dims.size(); ++f) {
    keep[f] = is_fock[f] ? (dims[f] > guard ? dims[f] - guard : 0) : dims[f];
  }
  return flat_indices(dims, keep);
}

void compare_claim(LinearizationReport& r, const std::vector<Eigen::Index>& idx) {
  const ComplexMatrix diff = select(r.computed, idx) - select(r.claimed, idx);
  r.constant_offset = diff.diagonal().real().mean();
  ComplexMatrix shifted = diff;
  shifted.diagonal().array() -= r.constant_offset;
  r.max_residual = max_abs(shifted);
}

double spectrum_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (hermitian_spectrum(a) - hermitian_spectrum(b)).cwiseAbs().maxCoeff();
}

// Block-diagonal exp over qubit basis states: block b is exp(-i G_b).
ComplexMatrix qubit_diagonal_exp(const std::vector<ComplexMatrix>& blocks) {
  const auto d = blocks.front().rows();
  const auto nb = static_cast<Eigen::Index>(blocks.size());
  ComplexMatrix out = ComplexMatrix::Zero(nb * d, nb * d);
  for (Eigen::Index b = 0; b < nb; ++b) out.block(b * d, b * d, d, d) = expm(-kI * blocks[b]);
  return out;
}

void check_guard_fits(std::size_t n, std::size_t guard) {
  if (n <= guard) fail(ErrorKind::Parameter, "Fock truncation must exceed the guard band");
}

}  // namespace

ComplexMatrix restrict_factors(const ComplexMatrix& m, const std::vector<std::size_t>& big_dims,
                               const std::vector<std::size_t>& small_dims) {
  if (big_dims.size() != small_dims.size()) fail(ErrorKind::Layout, "factor lists differ in length");
  std::size_t total = 1;
  for (std::size_t f = 0; f < big_dims.size(); ++f) {
    if (small_dims[f] > big_dims[f]) fail(ErrorKind::Layout, "cannot restrict a factor to a larger dimension");
    total *= big_dims[f];
  }
  if (static_cast<std::size_t>(m.rows()) != total) fail(ErrorKind::Layout, "matrix does not match factor dims");
  return select(m, flat_indices(big_dims, small_dims));
}

void IonLaserParams::validate() const {
  if (!(nu0 > 0.0)) fail(ErrorKind::Parameter, "nu0 must be positive");
  if (n_fock < 4) fail(ErrorKind::InvalidDimension, "n_fock must be >= 4");
  if (!(eta0 >= 0.0)) fail(ErrorKind::Parameter, "eta0 must be >= 0");
  if (std::abs(delta - (omega21 - omega_laser)) > 1e-12 * std::max({1.0, std::abs(omega21), std::abs(omega_laser)}))
    fail(ErrorKind::Parameter, "delta must equal omega21 - omega_laser");
  if (k_wave) {
    const double expected = *k_wave * std::sqrt(1.0 / (2.0 * nu0));
    if (std::abs(expected - eta0) > 1e-12 * std::max(1.0, eta0))
      fail(ErrorKind::Parameter, "eta0 inconsistent with k_wave: expected " + std::to_string(expected));
  }
  if (2 * n_fock > kMaxDim) fail(ErrorKind::Layout, "dimension exceeds memory guard");
}

void ManyIonParams::validate() const {
  if (rabis.empty() || rabis.size() != etas.size())
    fail(ErrorKind::Parameter, "rabis and etas must be non-empty and of equal length");
  if (n_fock < 4) fail(ErrorKind::InvalidDimension, "n_fock must be >= 4");
  if (!(nu > 0.0)) fail(ErrorKind::Parameter, "nu must be positive");
  if (rabis.size() > 12 || (std::size_t{1} << rabis.size()) * n_fock > kMaxDim)
    fail(ErrorKind::Layout, "2^J * n_fock exceeds memory guard");
}

void TwoDParams::validate() const {
  if (n_x < 4 || n_y < 4) fail(ErrorKind::InvalidDimension, "n_x and n_y must be >= 4");
  if (!(nu_x > 0.0) || !(nu_y > 0.0)) fail(ErrorKind::Parameter, "mode frequencies must be positive");
  if (2 * n_x * n_y > kMaxDim) fail(ErrorKind::Layout, "2 * n_x * n_y exceeds memory guard");
}

ComplexMatrix h_single_rotating(const IonLaserParams& p, double eta_t, double omega_tilde) {
  p.validate();
  if (!(eta_t >= 0.0)) fail(ErrorKind::Parameter, "eta(t) must be >= 0");
  if (!(omega_tilde > 0.0)) fail(ErrorKind::Parameter, "omega_tilde must be positive");
  const std::size_t n = p.n_fock;
  const ComplexMatrix id = identity(n);
  const ComplexMatrix disp = expm(-kI * eta_t * quadrature_sum(n));
  const ComplexMatrix excited = 0.5 * (identity(2) + pauli(Pauli::Z));
  ComplexMatrix h = omega_tilde * kron(identity(2), number_operator(n) + 0.5 * id);
  h += p.delta * kron(excited, id);
  const ComplexMatrix coupling = p.rabi * kron(pauli(Pauli::Minus), disp);
  h += coupling + coupling.adjoint();
  return h;
}

ComplexMatrix h_single_interaction(const IonLaserParams& p, const ErmakovSolution& sol, double t) {
  p.validate();
  if (p.delta != 0.0) fail(ErrorKind::Unsupported, "interaction-picture Hamiltonian is only defined for delta = 0");
  const std::size_t n = p.n_fock;
  const double phase = phase_integral(sol, t);
  const double eta = lamb_dicke(sol, p.eta0, t);
  const ComplexMatrix a = annihilation(n);
  const ComplexMatrix rotated = a * std::exp(-kI * phase) + a.adjoint() * std::exp(kI * phase);
  const ComplexMatrix coupling = p.rabi * kron(pauli(Pauli::Minus), expm(-kI * eta * rotated));
  return coupling + coupling.adjoint();
}

ComplexMatrix rotating_frame(double omega, double t, std::size_t n_fock) {
  const ComplexMatrix excited = 0.5 * (identity(2) + pauli(Pauli::Z));
  return kron(expm(-kI * omega * t * excited), identity(n_fock));
}

ComplexMatrix ermakov_frame(const ErmakovSolution& sol, double t, std::size_t n_fock) {
  const double nu0 = sol.nu0();
  const ComplexMatrix x = position_quadrature(n_fock, nu0);
  const ComplexMatrix pm = momentum_quadrature(n_fock, nu0);
  const double rho = sol.rho_at(t);
  const double rho_dot = sol.rho_dot_at(t);
  const ComplexMatrix squeeze = expm(kI * 0.5 * std::log(rho * std::sqrt(nu0)) * (x * pm + pm * x));
  const ComplexMatrix chirp = expm(-kI * rho_dot / (2.0 * rho) * x * x);
  return squeeze * chirp;
}

ComplexMatrix linearizer_single(double eta, std::size_t n_fock) {
  const ComplexMatrix x = 0.5 * eta * quadrature_sum(n_fock);
  const ComplexMatrix s = qubit_diagonal_exp({x, (-x).eval()});
  return kron(quarter_rotation(), identity(n_fock)) * s;
}

ComplexMatrix h_single_linearized(const IonLaserParams& p, double omega_tilde, std::complex<double> beta_t) {
  const std::size_t n = p.n_fock;
  const ComplexMatrix a = annihilation(n);
  const ComplexMatrix field = 0.5 * p.delta * identity(n) + kI * (a * beta_t - a.adjoint() * std::conj(beta_t));
  return omega_tilde * kron(identity(2), number_operator(n)) + p.rabi * kron(pauli(Pauli::Z), identity(n)) +
         kron(pauli(Pauli::X), field);
}

LinearizationReport linearize_single(const IonLaserParams& p, const ErmakovSolution& sol, double t,
                                     const LinearizeOptions& opt) {
  p.validate();
  check_guard_fits(p.n_fock, opt.guard);
  const double eta = lamb_dicke(sol, p.eta0, t);
  const double eta_dot = lamb_dicke_rate(sol, p.eta0, t);
  const double omega_tilde = derived_frequency(sol, t);

  IonLaserParams big = p;
  big.n_fock = p.n_fock + opt.pad;
  const ComplexMatrix h_big = h_single_rotating(big, eta, omega_tilde);
  const ComplexMatrix r_big = linearizer_single(eta, big.n_fock);
  const ComplexMatrix rot = kron(quarter_rotation(), identity(big.n_fock));
  const ComplexMatrix r_dot = rot * (-kI * 0.5 * eta_dot * kron(pauli(Pauli::Z), quadrature_sum(big.n_fock))) *
                              rot.adjoint() * r_big;
  const ComplexMatrix gen = r_big * h_big * r_big.adjoint() + kI * r_dot * r_big.adjoint();

  LinearizationReport r;
  r.computed = restrict_factors(gen, {2, big.n_fock}, {2, p.n_fock});
  r.claimed = h_single_linearized(p, omega_tilde, beta(sol, p.eta0, t));
  compare_claim(r, guarded({2, p.n_fock}, {false, true}, opt.guard));

  const ComplexMatrix h = h_single_rotating(p, eta, omega_tilde);
  const ComplexMatrix rr = linearizer_single(eta, p.n_fock);
  r.spectrum_distance = spectrum_distance(rr * h * rr.adjoint(), h);
  return r;
}

namespace {

struct ManyOps {
  std::size_t ions;
  std::size_t n;
  std::size_t qdim;

  ComplexMatrix on_ion(std::size_t j, const ComplexMatrix& op) const {
    const std::size_t before = std::size_t{1} << j;
    const std::size_t after = std::size_t{1} << (ions - j - 1);
    return kron(kron(kron(identity(before), op), identity(after)), identity(n));
  }
  ComplexMatrix on_mode(const ComplexMatrix& op) const { return kron(identity(qdim), op); }
};

ComplexMatrix h_many_impl(const ManyIonParams& p, std::size_t n) {
  const ManyOps ops{p.ions(), n, std::size_t{1} << p.ions()};
  ComplexMatrix h = p.nu * ops.on_mode(number_operator(n));
  const ComplexMatrix x = quadrature_sum(n);
  for (std::size_t j = 0; j < p.ions(); ++j) {
    h += 0.5 * p.delta * ops.on_ion(j, pauli(Pauli::Z));
    const ComplexMatrix c = p.rabis[j] * ops.on_ion(j, pauli(Pauli::Plus)) * ops.on_mode(expm(kI * p.etas[j] * x));
    h += c + c.adjoint();
  }
  return h;
}

ComplexMatrix linearizer_many_impl(const ManyIonParams& p, std::size_t n) {
  const std::size_t ions = p.ions();
  const std::size_t qdim = std::size_t{1} << ions;
  const ComplexMatrix x = quadrature_sum(n);
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(qdim);
  for (std::size_t b = 0; b < qdim; ++b) {
    double c = 0.0;
    for (std::size_t j = 0; j < ions; ++j) {
      const bool ground = (b >> (ions - j - 1)) & 1U;
      c += 0.5 * p.etas[j] * (ground ? -1.0 : 1.0);
    }
    blocks.emplace_back(c * x);
  }
  ComplexMatrix rot = quarter_rotation();
  for (std::size_t j = 1; j < ions; ++j) rot = kron(rot, quarter_rotation());
  return kron(rot, identity(n)) * qubit_diagonal_exp(blocks);
}

ComplexMatrix many_dipole(const ManyIonParams& p, const ManyOps& ops) {
  ComplexMatrix d = ComplexMatrix::Zero(ops.qdim * ops.n, ops.qdim * ops.n);
  for (std::size_t j = 0; j < p.ions(); ++j)
    for (std::size_t k = 0; k < p.ions(); ++k)
      d += 0.25 * p.etas[j] * p.etas[k] * ops.on_ion(j, pauli(Pauli::X)) * ops.on_ion(k, pauli(Pauli::X));
  return d;
}

}  // namespace

ComplexMatrix h_many(const ManyIonParams& p) {
  p.validate();
  return h_many_impl(p, p.n_fock);
}

ComplexMatrix linearizer_many(const ManyIonParams& p) {
  p.validate();
  return linearizer_many_impl(p, p.n_fock);
}

LinearizationReport linearize_many(const ManyIonParams& p, const LinearizeOptions& opt) {
  p.validate();
  check_guard_fits(p.n_fock, opt.guard);
  const std::size_t n = p.n_fock;
  const std::size_t nb = n + opt.pad;
  const std::size_t qdim = std::size_t{1} << p.ions();
  if (qdim * nb > kMaxDim) fail(ErrorKind::Layout, "padded dimension exceeds memory guard");

  const ComplexMatrix tb = linearizer_many_impl(p, nb);
  const ComplexMatrix conj_big = tb * h_many_impl(p, nb) * tb.adjoint();

  std::vector<std::size_t> big_dims(p.ions(), 2), small_dims(p.ions(), 2);
  std::vector<bool> is_fock(p.ions(), false);
  big_dims.push_back(nb);
  small_dims.push_back(n);
  is_fock.push_back(true);

  const ManyOps ops{p.ions(), n, qdim};
  const ComplexMatrix a = annihilation(n);
  ComplexMatrix without_dipole = p.nu * ops.on_mode(number_operator(n));
  for (std::size_t j = 0; j < p.ions(); ++j) {
    const ComplexMatrix sx = ops.on_ion(j, pauli(Pauli::X));
    without_dipole += -0.5 * p.delta * sx + p.rabis[j] * ops.on_ion(j, pauli(Pauli::Z));
    without_dipole += kI * (0.5 * p.etas[j] * p.nu) * ops.on_mode(a - a.adjoint()) * sx;
  }
  const ComplexMatrix dipole = many_dipole(p, ops);

  LinearizationReport r;
  r.computed = restrict_factors(conj_big, big_dims, small_dims);
  r.claimed = without_dipole + dipole;
  const auto idx = guarded(small_dims, is_fock, opt.guard);
  compare_claim(r, idx);

  // Fit computed - without_dipole ~ c * dipole + o * 1 on the guarded block.
  const ComplexMatrix delta = select(r.computed - without_dipole, idx);
  const ComplexMatrix dsel = select(dipole, idx);
  const ComplexMatrix id = ComplexMatrix::Identity(dsel.rows(), dsel.cols());
  auto dot = [](const ComplexMatrix& u, const ComplexMatrix& v) { return (u.adjoint() * v).trace().real(); };
  const double dd = dot(dsel, dsel), di = dot(dsel, id), ii = dot(id, id);
  const double det = dd * ii - di * di;
  if (det > 1e-12 * dd * ii) {
    const double bd = dot(dsel, delta), bi = dot(id, delta);
    r.fitted_dipole_coefficient = (bd * ii - bi * di) / det;
  }

  const ComplexMatrix h = h_many_impl(p, n);
  const ComplexMatrix t = linearizer_many_impl(p, n);
  r.spectrum_distance = spectrum_distance(t * h * t.adjoint(), h);
  return r;
}

namespace {

ComplexMatrix h_2d_impl(const TwoDParams& p, std::size_t nx, std::size_t ny) {
  const ComplexMatrix ix = identity(nx), iy = identity(ny);
  ComplexMatrix h = p.nu_x * kron(identity(2), kron(number_operator(nx), iy)) +
                    p.nu_y * kron(identity(2), kron(ix, number_operator(ny)));
  h += 0.5 * p.delta * kron(pauli(Pauli::Z), identity(nx * ny));
  const ComplexMatrix disp = kron(expm(kI * p.eta_x * quadrature_sum(nx)), expm(kI * p.eta_y * quadrature_sum(ny)));
  const ComplexMatrix c = p.rabi * kron(pauli(Pauli::Plus), disp);
  h += c + c.adjoint();
  return h;
}

ComplexMatrix linearizer_2d_impl(const TwoDParams& p, std::size_t nx, std::size_t ny) {
  const ComplexMatrix gx = 0.5 * p.eta_x * quadrature_sum(nx);
  const ComplexMatrix gy = 0.5 * p.eta_y * quadrature_sum(ny);
  const ComplexMatrix up = kron(expm(-kI * gx), expm(-kI * gy));
  const ComplexMatrix down = kron(expm(kI * gx), expm(kI * gy));
  const auto d = up.rows();
  ComplexMatrix s = ComplexMatrix::Zero(2 * d, 2 * d);
  s.topLeftCorner(d, d) = up;
  s.bottomRightCorner(d, d) = down;
  return kron(quarter_rotation(), identity(nx * ny)) * s;
}

}  // namespace

ComplexMatrix h_2d(const TwoDParams& p) {
  p.validate();
  return h_2d_impl(p, p.n_x, p.n_y);
}

ComplexMatrix linearizer_2d(const TwoDParams& p) {
  p.validate();
  return linearizer_2d_impl(p, p.n_x, p.n_y);
}

LinearizationReport linearize_2d(const TwoDParams& p, const LinearizeOptions& opt) {
  p.validate();
  check_guard_fits(p.n_x, opt.guard);
  check_guard_fits(p.n_y, opt.guard);
  const std::size_t bx = p.n_x + opt.pad, by = p.n_y + opt.pad;
  if (2 * bx * by > kMaxDim) fail(ErrorKind::Layout, "padded dimension exceeds memory guard");

  const ComplexMatrix tb = linearizer_2d_impl(p, bx, by);
  const ComplexMatrix conj_big = tb * h_2d_impl(p, bx, by) * tb.adjoint();

  const ComplexMatrix ax = annihilation(p.n_x), ay = annihilation(p.n_y);
  const ComplexMatrix ix = identity(p.n_x), iy = identity(p.n_y);
  const ComplexMatrix sx = kron(pauli(Pauli::X), identity(p.n_x * p.n_y));
  // The printed form carries a single nu on the linear term; nu_x is used.
  const double nu = p.nu_x;
  const ComplexMatrix linear =
      p.eta_x * kron(ax - ax.adjoint(), iy) + p.eta_y * kron(ix, ay - ay.adjoint());

  LinearizationReport r;
  r.computed = restrict_factors(conj_big, {2, bx, by}, {2, p.n_x, p.n_y});
  r.claimed = p.nu_x * kron(identity(2), kron(number_operator(p.n_x), iy)) +
              p.nu_y * kron(identity(2), kron(ix, number_operator(p.n_y))) - 0.5 * p.delta * sx + p.rabi * sx +
              (kI * nu / 2.0) * kron(pauli(Pauli::X), linear);
  compare_claim(r, guarded({2, p.n_x, p.n_y}, {false, true, true}, opt.guard));

  const ComplexMatrix h = h_2d_impl(p, p.n_x, p.n_y);
  const ComplexMatrix t = linearizer_2d_impl(p, p.n_x, p.n_y);
  r.spectrum_distance = spectrum_distance(t * h * t.adjoint(), h);
  return r;
}

namespace {

double guard_population(const ComplexVector& v, std::size_t n, std::size_t guard) {
  double pop = 0.0;
  const auto blocks = v.size() / static_cast<Eigen::Index>(n);
  for (Eigen::Index b = 0; b < blocks; ++b)
    for (std::size_t k = n - guard; k < n; ++k) pop += std::norm(v(b * static_cast<Eigen::Index>(n) + k));
  return pop;
}

struct FramePair {
  ComplexVector phi;
  ComplexVector psi;
};

// Hamiltonians of both frames with the quadrature eigenbasis cached, so a
// displacement costs two matrix products instead of an expm.
class SingleIonFrames {
 public:
  explicit SingleIonFrames(const IonLaserParams& p) : p_(p), n_(p.n_fock) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(quadrature_sum(n_));
    basis_ = es.eigenvectors();
    quad_eigs_ = es.eigenvalues();
    base_ = kron(identity(2), number_operator(n_));
    excited_ = kron(0.5 * (identity(2) + pauli(Pauli::Z)), identity(n_));
  }

  ComplexMatrix rotating(double eta, double omega_tilde) const {
    const ComplexVector ph = (-kI * eta * quad_eigs_.cast<cplx>()).array().exp();
    const ComplexMatrix disp = basis_ * ph.asDiagonal() * basis_.adjoint();
    ComplexMatrix h = omega_tilde * base_;
    h.diagonal().array() += 0.5 * omega_tilde;
    h += p_.delta * excited_;
    const auto nn = static_cast<Eigen::Index>(n_);
    h.block(nn, 0, nn, nn) += p_.rabi * disp;  // sigma_- block, |g><e|
    h.block(0, nn, nn, nn) += p_.rabi * disp.adjoint();
    return h;
  }

 private:
  IonLaserParams p_;
  std::size_t n_;
  ComplexMatrix basis_;
  Eigen::VectorXd quad_eigs_;
  ComplexMatrix base_, excited_;
};

// Midpoint-sampled piecewise-constant propagation of both frames over [t0, t1].
void advance(const IonLaserParams& p, const SingleIonFrames& frames, const ErmakovSolution& sol, FramePair& s,
             double t0, double t1, std::size_t steps, BetaConvention conv) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tm = t0 + (static_cast<double>(k) + 0.5) * h;
    const double eta = lamb_dicke(sol, p.eta0, tm);
    const double wt = derived_frequency(sol, tm);
    std::complex<double> b = beta(sol, p.eta0, tm);
    if (conv == BetaConvention::Conjugated) b = std::conj(b);
    s.phi = apply_evolution(frames.rotating(eta, wt), h, s.phi);
    s.psi = apply_evolution(h_single_linearized(p, wt, b), h, s.psi);
  }
}

}  // namespace

std::vector<DynamicsSample> dynamics_series(const IonLaserParams& p, const ErmakovSolution& sol,
                                            const StateVector& psi0, const std::vector<double>& times,
                                            const DynamicsOptions& opt) {
  p.validate();
  const std::size_t n = p.n_fock;
  if (psi0.dim() != 2 * n) fail(ErrorKind::Layout, "initial state does not match Qubit (x) Fock(n_fock)");
  if (opt.steps == 0) fail(ErrorKind::Parameter, "steps must be positive");
  check_guard_fits(n, opt.guard);
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) fail(ErrorKind::Parameter, "output times must be strictly increasing");
  if (!times.empty() && times.front() < sol.t_begin())
    fail(ErrorKind::OutOfRange, "output times start before the Ermakov solution");

  if (guard_population(psi0.amplitudes(), n, n - n / 2) > 1e-12)
    fail(ErrorKind::Truncation, "initial state must be supported below n_fock / 2");

  const SingleIonFrames frames(p);
  const double t_start = sol.t_begin();
  const ComplexMatrix r0 = linearizer_single(lamb_dicke(sol, p.eta0, t_start), n);
  FramePair coarse{psi0.amplitudes(), r0 * psi0.amplitudes()};
  FramePair fine = coarse;

  std::vector<DynamicsSample> out;
  out.reserve(times.size());
  double t_prev = t_start;
  for (double t : times) {
    if (t > t_prev) {
      advance(p, frames, sol, coarse, t_prev, t, opt.steps, opt.convention);
      advance(p, frames, sol, fine, t_prev, t, 2 * opt.steps, opt.convention);
      const double gap = std::max((coarse.phi - fine.phi).norm(), (coarse.psi - fine.psi).norm());
      if (gap > opt.convergence_tol)
        fail(ErrorKind::Convergence, "step halving changed the state by " + std::to_string(gap) + " at t = " +
                                         std::to_string(t) + "; increase steps");
      t_prev = t;
    }
    const ComplexMatrix rt = linearizer_single(lamb_dicke(sol, p.eta0, t), n);
    const cplx overlap = fine.psi.dot(rt * fine.phi);
    DynamicsSample sample;
    sample.t = t;
    sample.infidelity = std::max(0.0, 1.0 - std::norm(overlap));
    sample.leakage = std::max(guard_population(fine.phi, n, opt.guard), guard_population(fine.psi, n, opt.guard));
    out.push_back(sample);
  }
  return out;
}

double dynamics_equivalence(const IonLaserParams& p, const ErmakovSolution& sol, const StateVector& psi0,
                            double t_final, std::size_t steps, BetaConvention convention) {
  DynamicsOptions opt;
  opt.steps = steps;
  opt.convention = convention;
  return dynamics_series(p, sol, psi0, {t_final}, opt).back().infidelity;
}

}  // namespace qxform
