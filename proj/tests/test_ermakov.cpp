#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qxform/ermakov.hpp"
#include "qxform/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace qxform;

namespace {

std::vector<double> grid(double t0, double t1, int n) {
  std::vector<double> ts;
  for (int i = 0; i <= n; ++i) ts.push_back(t0 + (t1 - t0) * i / n);
  return ts;
}

// Pinney's closed form for constant nu with rho_dot(0) = 0:
// rho^2 = rho0^2 cos^2(nu t) + sin^2(nu t) / (nu^2 rho0^2).
double pinney(double nu, double rho0, double t) {
  const double c = std::cos(nu * t);
  const double s = std::sin(nu * t);
  return std::sqrt(rho0 * rho0 * c * c + s * s / (nu * nu * rho0 * rho0));
}

bool throws_kind(ErrorKind kind, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("constant frequency fixed point") {
  const double nu = 2.0;
  const auto sol = solve_ermakov(ConstantFrequency{nu}, 1.0 / std::sqrt(nu), 0.0, grid(0, 5, 50));
  for (double r : sol.rho()) CHECK(std::abs(r - 1.0 / std::sqrt(nu)) < 1e-12);
  CHECK(std::abs(derived_frequency(sol, 2.37) - nu) < 1e-12);
  CHECK(std::abs(lamb_dicke(sol, 0.1, 3.3) - 0.1) < 1e-12);
  const auto b = beta(sol, 0.1, 1.1);
  CHECK(std::abs(b.real() - 0.1 * nu / 2) < 1e-12);
  CHECK(std::abs(b.imag()) < 1e-12);
  CHECK(std::abs(beta(sol, 0.0, 1.0)) == 0.0);
}

TEST_CASE("defaults match the instantaneous ground state") {
  const auto ic = default_initial_conditions(QuenchFrequency{4.0, 1.0, 2.0}, 0.0);
  CHECK(ic.rho0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ic.rho_dot0 == 0.0);
}

TEST_CASE("free evolution closed form") {
  const auto ts = grid(0, 5, 50);
  const auto sol = solve_ermakov(TabulatedFrequency{{0.0, 5.0}, {0.0, 0.0}}, 1.0, 0.0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(sol.rho()[i] - std::sqrt(1 + ts[i] * ts[i])) < 1e-8);
  CHECK(std::abs(derived_frequency(sol, 1.0) - 0.5) < 1e-10);
  // Hermite interpolation between samples.
  CHECK(std::abs(sol.rho_at(0.4321) - std::sqrt(1 + 0.4321 * 0.4321)) < 1e-9);
  CHECK(std::abs(sol.rho_dot_at(2.0101) - 2.0101 / std::sqrt(1 + 2.0101 * 2.0101)) < 1e-9);
}

TEST_CASE("generic constant-frequency solution against the Pinney form") {
  const auto ts = grid(0, 5, 50);
  const auto sol = solve_ermakov(ConstantFrequency{1.4}, 1.3, 0.0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(sol.rho()[i] - pinney(1.4, 1.3, ts[i])) < 1e-9);

  const auto e = first_integral(sol);
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  CHECK(*hi - *lo < 1e-8);
  CHECK(ermakov_residual(sol).max_residual < 1e-8);
}

TEST_CASE("quench") {
  const auto ts = grid(0, 5, 50);
  const QuenchFrequency q{1.0, 2.0, 1.0};
  const auto sol = solve_ermakov(q, 1.0, 0.0, ts);
  const auto res = ermakov_residual(sol);
  CHECK(res.max_residual < 1e-8);
  CHECK(res.excluded > 0);
  CHECK(res.checked > 1000);

  // Before the switch the fixed point of nu = 1 holds exactly.
  CHECK(std::abs(sol.rho_at(0.73) - 1.0) < 1e-12);
  // omega_tilde is continuous across the switch.
  CHECK(std::abs(derived_frequency(sol, 1.0 - 1e-9) - derived_frequency(sol, 1.0 + 1e-9)) < 1e-7);

  // After the switch: Pinney form for nu = 2 started from rho = 1.
  for (double t : {1.5, 2.2, 4.9}) CHECK(std::abs(sol.rho_at(t) - pinney(2.0, 1.0, t - 1.0)) < 1e-9);

  ErmakovOptions fine;
  fine.max_step = 5e-4;
  const auto sol2 = solve_ermakov(q, 1.0, 0.0, ts, fine);
  double gap = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) gap = std::max(gap, std::abs(sol.rho()[i] - sol2.rho()[i]));
  CHECK(gap < 1e-9);

  // Im beta = -eta_dot / 2, checked against a difference quotient of eta.
  const double t = 2.3;
  const double h = 1e-5;
  const double fd = (lamb_dicke(sol, 0.1, t + h) - lamb_dicke(sol, 0.1, t - h)) / (2 * h);
  CHECK(std::abs(beta(sol, 0.1, t).imag() + fd / 2) < 1e-6);
  CHECK(std::abs(lamb_dicke(sol, 0.1, t) / 0.1 - sol.rho_at(t) * std::sqrt(sol.nu0())) < 1e-14);
}

TEST_CASE("tabulated schedule") {
  const TabulatedFrequency tab{{0.0, 2.0, 5.0}, {1.0, 1.5, 0.8}};
  const FrequencySchedule s = tab;
  CHECK(s.at(1.0) == doctest::Approx(1.25));
  const auto sol = solve_ermakov(tab, 1.0, 0.0, grid(0, 5, 50));
  CHECK(ermakov_residual(sol).max_residual < 1e-8);
  CHECK(throws_kind(ErrorKind::OutOfRange, [&] { solve_ermakov(tab, 1.0, 0.0, grid(0, 6, 10)); }));
  CHECK(throws_kind(ErrorKind::OutOfRange, [&] { sol.rho_at(5.5); }));
}

TEST_CASE("phase integral") {
  const auto sol = solve_ermakov(ConstantFrequency{1.5}, 1.0 / std::sqrt(1.5), 0.0, grid(0, 2, 4));
  CHECK(std::abs(phase_integral(sol, 1.3) - 1.5 * 1.3) < 1e-12);
  CHECK(phase_integral(sol, 0.0) == 0.0);
}

TEST_CASE("errors") {
  CHECK(throws_kind(ErrorKind::Parameter, [] { FrequencySchedule(ConstantFrequency{0.0}); }));
  CHECK(throws_kind(ErrorKind::Parameter, [] { FrequencySchedule(QuenchFrequency{1.0, -1.0, 0.5}); }));
  CHECK(throws_kind(ErrorKind::Parameter, [] { FrequencySchedule(TabulatedFrequency{{0.0, 0.0}, {1.0, 1.0}}); }));
  CHECK(throws_kind(ErrorKind::Parameter, [] { FrequencySchedule(TabulatedFrequency{{0.0, 1.0}, {1.0, -1.0}}); }));
  CHECK(throws_kind(ErrorKind::Parameter, [] { solve_ermakov(ConstantFrequency{1.0}, -1.0, 0.0, {0.0, 1.0}); }));
  CHECK(throws_kind(ErrorKind::Parameter, [] { solve_ermakov(ConstantFrequency{1.0}, 1.0, 0.0, {1.0, 0.5}); }));
  CHECK(throws_kind(ErrorKind::Singularity, [] { solve_ermakov(ConstantFrequency{1.0}, 1.0, -1e6, {0.0, 1.0}); }));
  CHECK(throws_kind(ErrorKind::Parameter,
                    [] { default_initial_conditions(TabulatedFrequency{{0.0, 1.0}, {0.0, 0.0}}, 0.0); }));
}
