#include "qxform/kerr.hpp"

#include "qxform/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qxform {

namespace {

void require_dim(const KerrParams& p, const ComplexMatrix& rho) {
  const auto n = static_cast<Eigen::Index>(p.n_fock);
  if (rho.rows() != n || rho.cols() != n)
    fail(ErrorKind::InvalidDimension, "operator must be " + std::to_string(p.n_fock) + "x" + std::to_string(p.n_fock));
}

// exp(z) - 1 without cancellation for small |z|.
std::complex<double> expm1(std::complex<double> z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

}  // namespace

void KerrParams::validate() const {
  if (!std::isfinite(chi)) fail(ErrorKind::Parameter, "chi must be finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail(ErrorKind::Parameter, "gamma must be >= 0");
  if (n_fock < 2) fail(ErrorKind::InvalidDimension, "n_fock must be >= 2");
  if (n_fock > 512) fail(ErrorKind::Layout, "n_fock exceeds memory guard");
}

ComplexMatrix apply_superop(Superop tag, const KerrParams& p, const ComplexMatrix& rho) {
  p.validate();
  require_dim(p, rho);
  const auto n = static_cast<Eigen::Index>(p.n_fock);
  ComplexMatrix out(n, n);
  switch (tag) {
    case Superop::J: {
      const ComplexMatrix a = annihilation(p.n_fock);
      out = 2.0 * p.gamma * a * rho * a.adjoint();
      break;
    }
    case Superop::L:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = -p.gamma * static_cast<double>(i + j) * rho(i, j);
      break;
    case Superop::Y:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          out(i, j) = -kI * p.chi * static_cast<double>(i * i - j * j) * rho(i, j);
      break;
    case Superop::R:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = 2.0 * static_cast<double>(i - j) * rho(i, j);
      break;
  }
  return out;
}

SuperopCommutatorResidual superop_commutator_check(const KerrParams& p, std::span<const ComplexMatrix> samples,
                                                   double c) {
  if (samples.empty()) fail(ErrorKind::Parameter, "need at least one sample matrix");
  auto ap = [&](Superop s, const ComplexMatrix& m) { return apply_superop(s, p, m); };
  SuperopCommutatorResidual r;
  for (const auto& rho : samples) {
    const ComplexMatrix j_rho = ap(Superop::J, rho);
    const ComplexMatrix yj = ap(Superop::Y, j_rho) - ap(Superop::J, ap(Superop::Y, rho));
    const ComplexMatrix rhs = c * kI * p.chi * ap(Superop::R, j_rho);
    r.yj = std::max(r.yj, max_abs(yj - rhs));
    const ComplexMatrix rj = ap(Superop::R, j_rho) - ap(Superop::J, ap(Superop::R, rho));
    r.rj = std::max(r.rj, max_abs(rj));
  }
  return r;
}

std::complex<double> gain_factor(const KerrParams& p, long n_minus_m, double t) {
  const std::complex<double> c{2.0 * p.gamma, 2.0 * p.chi * static_cast<double>(n_minus_m)};
  if (std::abs(c) < 1e-12) return 2.0 * p.gamma * t;
  return 2.0 * p.gamma * (-expm1(-c * t)) / c;
}

ComplexMatrix analytic_solution(const KerrParams& p, const ComplexMatrix& rho0, double t) {
  p.validate();
  require_dim(p, rho0);
  if (!(t >= 0.0)) fail(ErrorKind::Parameter, "time must be >= 0");
  const auto n_dim = static_cast<long>(p.n_fock);
  ComplexMatrix out(n_dim, n_dim);
  for (long n = 0; n < n_dim; ++n) {
    for (long m = 0; m < n_dim; ++m) {
      const std::complex<double> q = gain_factor(p, n - m, t);
      const double phase = -p.chi * t * static_cast<double>(n * n - m * m);
      const double decay = -p.gamma * t * static_cast<double>(n + m);
      const std::complex<double> prefactor = std::exp(decay) * std::complex<double>{std::cos(phase), std::sin(phase)};
      // weight_k = sqrt((n+k)!(m+k)!/(n!m!)) q^k / k!, built incrementally.
      std::complex<double> weight = 1.0;
      std::complex<double> acc = rho0(n, m);
      const long k_max = n_dim - 1 - std::max(n, m);
      for (long k = 1; k <= k_max; ++k) {
        weight *= q * std::sqrt(static_cast<double>((n + k) * (m + k))) / static_cast<double>(k);
        acc += weight * rho0(n + k, m + k);
      }
      out(n, m) = prefactor * acc;
    }
  }
  return out;
}

DensityMatrix analytic_solution(const KerrParams& p, const DensityMatrix& rho0, double t) {
  return DensityMatrix(analytic_solution(p, rho0.matrix(), t));
}

ComplexMatrix lindblad_rhs(const KerrParams& p, const ComplexMatrix& rho) {
  const auto n = static_cast<Eigen::Index>(p.n_fock);
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto di = static_cast<double>(i);
      const auto dj = static_cast<double>(j);
      std::complex<double> v = (-kI * p.chi * (di * di - dj * dj) - p.gamma * (di + dj)) * rho(i, j);
      if (i + 1 < n && j + 1 < n) v += 2.0 * p.gamma * std::sqrt((di + 1.0) * (dj + 1.0)) * rho(i + 1, j + 1);
      out(i, j) = v;
    }
  }
  return out;
}

LindbladResult lindblad_integrate(const KerrParams& p, const ComplexMatrix& rho0, double t, std::size_t steps) {
  p.validate();
  require_dim(p, rho0);
  if (!(t >= 0.0)) fail(ErrorKind::Parameter, "time must be >= 0");
  if (steps == 0) fail(ErrorKind::Convergence, "steps must be positive");
  const double dt = t / static_cast<double>(steps);
  const auto nf = static_cast<double>(p.n_fock);
  const double stiffness = dt * std::max(std::abs(p.chi) * nf * nf, p.gamma * nf);
  if (stiffness > 0.1)
    fail(ErrorKind::Convergence, "RK4 step too coarse: dt * max(|chi| N^2, gamma N) = " + std::to_string(stiffness) +
                                     " > 0.1");

  LindbladResult r;
  r.rho = rho0;
  for (std::size_t s = 0; s < steps; ++s) {
    const ComplexMatrix k1 = lindblad_rhs(p, r.rho);
    const ComplexMatrix k2 = lindblad_rhs(p, r.rho + 0.5 * dt * k1);
    const ComplexMatrix k3 = lindblad_rhs(p, r.rho + 0.5 * dt * k2);
    const ComplexMatrix k4 = lindblad_rhs(p, r.rho + dt * k3);
    ComplexMatrix next = r.rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    r.max_hermiticity_drift = std::max(r.max_hermiticity_drift, 0.5 * max_abs(next - next.adjoint()));
    r.rho = 0.5 * (next + next.adjoint());
  }
  if (!r.rho.allFinite()) fail(ErrorKind::Numeric, "RK4 produced non-finite entries");
  r.min_eigenvalue = hermitian_spectrum(r.rho)(0);
  if (r.min_eigenvalue < -1e-8)
    fail(ErrorKind::Positivity, "RK4 density matrix has eigenvalue " + std::to_string(r.min_eigenvalue));
  return r;
}

std::vector<KerrCompareRow> compare(const KerrParams& p, const ComplexMatrix& rho0, const std::vector<double>& times,
                                    std::size_t steps_per_interval) {
  p.validate();
  require_dim(p, rho0);
  std::vector<KerrCompareRow> rows;
  rows.reserve(times.size());
  ComplexMatrix rk4 = rho0;
  double t_prev = 0.0;
  for (double t : times) {
    if (t < t_prev) fail(ErrorKind::Parameter, "compare times must be non-decreasing and >= 0");
    if (t > t_prev) {
      rk4 = lindblad_integrate(p, rk4, t - t_prev, steps_per_interval).rho;
      t_prev = t;
    }
    const ComplexMatrix exact = analytic_solution(p, rho0, t);
    KerrCompareRow row;
    row.t = t;
    row.max_abs_diff = max_abs(exact - rk4);
    row.trace_analytic = exact.trace().real();
    row.trace_rk4 = rk4.trace().real();
    row.hermiticity_analytic = max_abs(exact - exact.adjoint());
    row.min_eig_analytic = hermitian_spectrum(0.5 * (exact + exact.adjoint()))(0);
    row.min_eig_rk4 = hermitian_spectrum(rk4)(0);
    rows.push_back(row);
  }
  return rows;
}

std::complex<double> mean_amplitude(const ComplexMatrix& rho) {
  std::complex<double> acc = 0.0;
  // tr(a rho) = sum_n sqrt(n+1) rho(n+1, n)
  for (Eigen::Index n = 0; n + 1 < rho.rows(); ++n) acc += std::sqrt(static_cast<double>(n + 1)) * rho(n + 1, n);
  return acc;
}

}  // namespace qxform
