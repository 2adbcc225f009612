#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qxform/errors.hpp"
#include "qxform/kerr.hpp"
#include "qxform/lcg.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace qxform;

namespace {

bool throws_kind(ErrorKind kind, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

ComplexMatrix dyad(std::size_t dim, std::size_t n, std::size_t m) {
  ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
  d(n, m) = 1.0;
  return d;
}

ComplexMatrix pure(const StateVector& psi) { return psi.amplitudes() * psi.amplitudes().adjoint(); }

std::vector<ComplexMatrix> lcg_samples(std::size_t count, std::size_t n) {
  Lcg rng(42);
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_hermitian(rng, n));
  return out;
}

}  // namespace

TEST_CASE("parameter validation") {
  KerrParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma = -0.1;
  CHECK(throws_kind(ErrorKind::Parameter, [&] { p.validate(); }));
  p = {};
  p.chi = std::nan("");
  CHECK(throws_kind(ErrorKind::Parameter, [&] { p.validate(); }));
  p = {};
  p.n_fock = 1;
  CHECK(throws_kind(ErrorKind::InvalidDimension, [&] { p.validate(); }));
  p.n_fock = 600;
  CHECK(throws_kind(ErrorKind::Layout, [&] { p.validate(); }));
}

TEST_CASE("superoperators on dyads") {
  const KerrParams p{0.4, 0.3, 6};
  CHECK(max_abs(apply_superop(Superop::J, p, dyad(6, 1, 1)) - 0.6 * dyad(6, 0, 0)) < 1e-15);
  CHECK(max_abs(apply_superop(Superop::J, p, dyad(6, 3, 2)) - 0.6 * std::sqrt(6.0) * dyad(6, 2, 1)) < 1e-14);
  CHECK(max_abs(apply_superop(Superop::J, p, dyad(6, 0, 4))) == 0.0);
  for (std::size_t n = 0; n < 6; ++n) CHECK(max_abs(apply_superop(Superop::Y, p, dyad(6, n, n))) == 0.0);
  CHECK(max_abs(apply_superop(Superop::Y, p, dyad(6, 3, 1)) - (-kI * 0.4 * 8.0) * dyad(6, 3, 1)) < 1e-15);
  CHECK(max_abs(apply_superop(Superop::R, p, dyad(6, 4, 1)) - 6.0 * dyad(6, 4, 1)) == 0.0);
  CHECK(max_abs(apply_superop(Superop::L, p, dyad(6, 2, 5)) + 0.3 * 7.0 * dyad(6, 2, 5)) < 1e-15);

  // R = 2 [n, .] and Y = -i chi [n^2, .] as matrix products.
  const ComplexMatrix rho = lcg_samples(1, 6)[0];
  const ComplexMatrix num = number_operator(6);
  CHECK(max_abs(apply_superop(Superop::R, p, rho) - 2.0 * commutator(num, rho)) < 1e-13);
  CHECK(max_abs(apply_superop(Superop::Y, p, rho) + kI * 0.4 * commutator(num * num, rho)) < 1e-13);

  // J + L + Y is the master-equation generator.
  const ComplexMatrix sum =
      apply_superop(Superop::J, p, rho) + apply_superop(Superop::L, p, rho) + apply_superop(Superop::Y, p, rho);
  CHECK(max_abs(sum - lindblad_rhs(p, rho)) < 1e-13);
  CHECK(max_abs(oracle::unvec(oracle::kerr_liouvillian(0.4, 0.3, 6) * oracle::vec(rho), 6) - sum) < 1e-13);

  CHECK(throws_kind(ErrorKind::InvalidDimension, [&] { apply_superop(Superop::J, p, ComplexMatrix::Zero(5, 5)); }));
}

TEST_CASE("superoperator commutators") {
  const KerrParams p{0.7, 0.2, 12};
  const auto samples = lcg_samples(20, 12);
  const auto one = superop_commutator_check(p, samples, 1.0);
  CHECK(one.yj < 1e-12);
  CHECK(one.rj < 1e-12);
  // With coefficient 2 the relation leaves i chi R J over.
  const auto two = superop_commutator_check(p, samples, 2.0);
  CHECK(two.yj > 1.0);
  CHECK(two.rj < 1e-12);

  // The leftover is exactly one i chi R J.
  double leftover = 0.0;
  for (const auto& s : samples) {
    const ComplexMatrix rj = apply_superop(Superop::R, p, apply_superop(Superop::J, p, s));
    leftover = std::max(leftover, max_abs(kI * 0.7 * rj));
  }
  CHECK(std::abs(two.yj - leftover) < 1e-10);

  const KerrParams flat{0.0, 0.2, 12};
  CHECK(superop_commutator_check(flat, samples, 2.0).max() < 1e-12);
  CHECK(throws_kind(ErrorKind::Parameter, [&] { superop_commutator_check(p, std::span<const ComplexMatrix>{}); }));
}

TEST_CASE("gain factor") {
  const KerrParams p{0.5, 0.2, 8};
  for (long d : {-3L, 0L, 2L}) {
    const double t = 1.3;
    const cplx c{0.4, 1.0 * static_cast<double>(d)};
    CHECK(std::abs(gain_factor(p, d, t) - 0.4 * (1.0 - std::exp(-c * t)) / c) < 1e-14);
  }
  // Small exponent: series 2 gamma t (1 - c t / 2 + ...).
  const KerrParams tiny{1e-9, 1e-9, 8};
  const cplx ct = cplx{2e-9, 2e-9} * 0.5;
  CHECK(std::abs(gain_factor(tiny, 1, 0.5) - 2e-9 * 0.5 * (1.0 - ct / 2.0 + ct * ct / 6.0)) < 1e-15 * 1e-9);
  const KerrParams none{0.0, 0.0, 8};
  CHECK(gain_factor(none, 0, 3.0) == cplx{0.0, 0.0});
}

TEST_CASE("closed form special cases") {
  const std::size_t n = 10;
  const ComplexMatrix rho = lcg_samples(1, n)[0];
  CHECK(max_abs(analytic_solution(KerrParams{0.3, 0.1, n}, rho, 0.0) - rho) < 1e-15);
  CHECK(max_abs(analytic_solution(KerrParams{0.0, 0.0, n}, rho, 5.0) - rho) < 1e-15);

  // Revival and the cat at half period.
  const double chi = 0.25;
  const KerrParams p{chi, 0.0, 24};
  const ComplexMatrix coh = pure(coherent_state(24, 1.2));
  CHECK(max_abs(analytic_solution(p, coh, 2 * std::numbers::pi / chi) - coh) < 1e-12);
  CHECK(max_abs(analytic_solution(p, coh, std::numbers::pi / chi) - pure(coherent_state(24, -1.2))) < 1e-12);

  // Single photon decay.
  const KerrParams lossy{0.5, 0.1, 6};
  const ComplexMatrix one = analytic_solution(lossy, dyad(6, 1, 1), 3.0);
  CHECK(std::abs(one(1, 1) - std::exp(-0.6)) < 1e-15);
  CHECK(std::abs(one(0, 0) - (1.0 - std::exp(-0.6))) < 1e-15);

  // Binomial cascade from |2>.
  const double t = 1.7, s = std::exp(-2 * 0.1 * t);
  const ComplexMatrix two = analytic_solution(lossy, dyad(6, 2, 2), t);
  CHECK(std::abs(two(2, 2) - s * s) < 1e-15);
  CHECK(std::abs(two(1, 1) - 2 * s * (1 - s)) < 1e-15);
  CHECK(std::abs(two(0, 0) - (1 - s) * (1 - s)) < 1e-15);
  CHECK(max_abs(two - two.diagonal().asDiagonal().toDenseMatrix()) == 0.0);

  // (|0> + |2>)/sqrt2: coherence picks up exp(4 i chi t).
  ComplexVector v = ComplexVector::Zero(6);
  v(0) = v(2) = 1 / std::sqrt(2.0);
  const ComplexMatrix sup = analytic_solution(KerrParams{0.5, 0.0, 6}, pure(StateVector(v)), t);
  CHECK(std::abs(sup(0, 2) - 0.5 * std::exp(4.0 * kI * 0.5 * t)) < 1e-15);
}

TEST_CASE("closed form against the Liouvillian exponential") {
  const std::size_t n = 10;
  const auto samples = lcg_samples(3, n);
  for (const KerrParams& p : {KerrParams{0.3, 0.1, n}, KerrParams{-0.8, 0.05, n}, KerrParams{0.0, 0.4, n}})
    for (double t : {0.5, 2.0})
      for (const auto& s : samples) CHECK(max_abs(analytic_solution(p, s, t) - oracle::kerr_evolve(p.chi, p.gamma, s, t)) < 1e-10);
}

TEST_CASE("closed form invariants") {
  const KerrParams p{0.6, 0.15, 16};
  const DensityMatrix rho0(pure(coherent_state(16, cplx{1.0, 0.5})));
  const ComplexMatrix mixed = lcg_samples(1, 16)[0];
  for (double t : {0.3, 1.0, 4.0}) {
    const ComplexMatrix r = analytic_solution(p, rho0.matrix(), t);
    CHECK(std::abs(r.trace() - 1.0) < 1e-12);
    CHECK(is_hermitian(r, 1e-13));
    CHECK(hermitian_spectrum(r)(0) > -1e-12);
    CHECK(std::abs(analytic_solution(p, mixed, t).trace() - mixed.trace()) < 1e-12);
    CHECK(analytic_solution(p, rho0, t).dim() == 16);
  }
  for (double t1 : {0.4, 1.1})
    for (double t2 : {0.7, 2.5}) {
      const ComplexMatrix once = analytic_solution(p, mixed, t1 + t2);
      const ComplexMatrix twice = analytic_solution(p, analytic_solution(p, mixed, t1), t2);
      CHECK(max_abs(once - twice) < 1e-12);
    }

  // Populations evolve independently of the coherences.
  const ComplexMatrix diag = mixed.diagonal().asDiagonal().toDenseMatrix();
  const ComplexMatrix full = analytic_solution(p, mixed, 1.3);
  CHECK(max_abs(full.diagonal() - analytic_solution(p, diag, 1.3).diagonal()) < 1e-14);

  // <a> decays as exp(-gamma t) without the Kerr term.
  const KerrParams damped{0.0, 0.2, 16};
  const ComplexMatrix coh = pure(coherent_state(16, cplx{1.5, -0.5}));
  const cplx a0 = mean_amplitude(coh);
  for (double t : {0.5, 2.0, 5.0})
    CHECK(std::abs(mean_amplitude(analytic_solution(damped, coh, t)) - a0 * std::exp(-0.2 * t)) < 1e-12);

  CHECK(throws_kind(ErrorKind::Parameter, [&] { analytic_solution(p, mixed, -1.0); }));
  CHECK(throws_kind(ErrorKind::InvalidDimension, [&] { analytic_solution(p, ComplexMatrix::Zero(8, 8), 1.0); }));
}

TEST_CASE("RK4 integration") {
  const KerrParams p{0.3, 0.1, 12};
  const ComplexMatrix rho0 = pure(coherent_state(12, 1.0));
  const auto coarse = lindblad_integrate(p, rho0, 2.0, 1000);
  const auto fine = lindblad_integrate(p, rho0, 2.0, 2000);
  CHECK(max_abs(coarse.rho - fine.rho) < 1e-8);
  CHECK(max_abs(fine.rho - analytic_solution(p, rho0, 2.0)) < 1e-10);
  CHECK(std::abs(fine.rho.trace() - 1.0) < 1e-12);
  CHECK(fine.max_hermiticity_drift < 1e-14);
  CHECK(fine.min_eigenvalue > -1e-10);

  CHECK(throws_kind(ErrorKind::Convergence, [&] { lindblad_integrate(p, rho0, 2.0, 10); }));
  CHECK(throws_kind(ErrorKind::Convergence, [&] { lindblad_integrate(p, rho0, 2.0, 0); }));
  CHECK(throws_kind(ErrorKind::Parameter, [&] { lindblad_integrate(p, rho0, -1.0, 100); }));
  CHECK(throws_kind(ErrorKind::InvalidDimension, [&] { lindblad_integrate(p, ComplexMatrix::Identity(4, 4), 1.0, 100); }));
}

TEST_CASE("compare") {
  const KerrParams p{0.5, 0.2, 14};
  const ComplexMatrix rho0 = pure(coherent_state(14, 1.0));
  const auto rows = compare(p, rho0, {0.0, 0.5, 1.0, 2.0}, 2000);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].max_abs_diff == 0.0);
  for (const auto& r : rows) {
    CHECK(r.max_abs_diff < 1e-10);
    CHECK(std::abs(r.trace_analytic - 1.0) < 1e-12);
    CHECK(std::abs(r.trace_rk4 - 1.0) < 1e-12);
    CHECK(r.min_eig_analytic > -1e-12);
    CHECK(r.hermiticity_analytic < 1e-13);
  }
  CHECK(throws_kind(ErrorKind::Parameter, [&] { compare(p, rho0, {1.0, 0.5}, 2000); }));
}
