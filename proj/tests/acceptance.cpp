// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "qxform/ermakov.hpp"
#include "qxform/ion_laser.hpp"
#include "qxform/kerr.hpp"
#include "qxform/lcg.hpp"
#include "qxform/slow_atom.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace qxform;

namespace {

struct Part {
  std::string what;
  double value;
  double tol;  // 0 demands exact equality
  bool ok() const { return tol == 0.0 ? value == 0.0 : value < tol; }
};

struct Outcome {
  std::vector<Part> parts;
  std::string info;
};

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> grid(double t0, double t1, int n) {
  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(t0 + (t1 - t0) * i / (n - 1));
  return ts;
}

ComplexMatrix coherent_rho(std::size_t n, double alpha) {
  const ComplexVector v = coherent_state(n, alpha).amplitudes();
  return v * v.adjoint();
}

Outcome kerr_differential() {
  const KerrParams p{0.5, 0.1, 16};
  double diff = 0.0, trace = 0.0;
  for (const auto& r : compare(p, coherent_rho(16, 1.0), grid(0.0, 5.0, 11), 5000)) {
    diff = std::max(diff, r.max_abs_diff);
    trace = std::max(trace, std::abs(r.trace_analytic - 1.0));
  }
  return {{{"max |analytic - RK4|", diff, 1e-6}, {"max |tr - 1|", trace, 1e-10}}, ""};
}

Outcome superop_algebra() {
  const KerrParams p{0.5, 0.1, 8};
  Lcg rng(42);
  std::vector<ComplexMatrix> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(random_hermitian(rng, 8));
  const auto two = superop_commutator_check(p, samples, 2.0);
  const auto one = superop_commutator_check(p, samples, 1.0);
  char info[160];
  std::snprintf(info, sizeof info, "[Y,J] = 1 i chi R J holds to %.1e", one.yj);
  return {{{"[Y,J] - 2 i chi R J", two.yj, 1e-12}, {"[R,J]", two.rj, 1e-12}}, info};
}

Outcome semigroup() {
  const KerrParams p{0.5, 0.1, 16};
  const ComplexMatrix rho0 = coherent_rho(16, 1.0);
  double m = 0.0;
  for (auto [a, b] : {std::pair{0.3, 0.7}, {1.0, 1.0}, {2.0, 0.5}})
    m = std::max(m, max_abs(analytic_solution(p, analytic_solution(p, rho0, a), b) - analytic_solution(p, rho0, a + b)));
  return {{{"composition", m, 1e-9}}, ""};
}

Outcome ermakov() {
  const auto ts = grid(0.0, 5.0, 51);
  const auto constant = solve_ermakov(ConstantFrequency{2.0}, 1.0 / std::sqrt(2.0), 0.0, ts);
  const auto quench = solve_ermakov(QuenchFrequency{1.0, 2.0, 1.0}, 1.0, 0.0, ts);
  const auto tab = solve_ermakov(TabulatedFrequency{{0.0, 2.0, 5.0}, {1.0, 1.5, 0.8}}, 1.0, 0.0, ts);
  const auto free = solve_ermakov(TabulatedFrequency{{0.0, 5.0}, {0.0, 0.0}}, 1.0, 0.0, ts);
  std::vector<double> root;
  for (double t : ts) root.push_back(std::sqrt(1.0 + t * t));
  const auto e = first_integral(solve_ermakov(ConstantFrequency{1.0}, 1.3, 0.0, ts));
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  const double res = std::max({ermakov_residual(constant).max_residual, ermakov_residual(quench).max_residual,
                               ermakov_residual(tab).max_residual});
  return {{{"residual", res, 1e-8},
           {"rho = nu0^-1/2", max_diff(constant.rho(), std::vector<double>(ts.size(), 1.0 / std::sqrt(2.0))), 1e-8},
           {"rho = sqrt(1 + t^2)", max_diff(free.rho(), root), 1e-8},
           {"first integral drift", *hi - *lo, 1e-8}},
          ""};
}

Outcome single_ion() {
  IonLaserParams p;
  const auto sol = solve_ermakov(ConstantFrequency{1.0}, 1.0, 0.0, {0.0, 2.0});
  const auto rep = linearize_single(p, sol, 1.0);
  ComplexVector g0 = ComplexVector::Zero(2 * static_cast<Eigen::Index>(p.n_fock));
  g0(static_cast<Eigen::Index>(p.n_fock)) = 1.0;
  return {{{"claimed vs computed", rep.max_residual, 1e-8},
           {"infidelity at t=2", dynamics_equivalence(p, sol, StateVector(g0), 2.0, 1000), 1e-6}},
          ""};
}

Outcome many_ion() {
  ManyIonParams p;
  p.rabis = {1.0, 1.0};
  p.etas = {0.1, 0.1};
  const auto rep = linearize_many(p);
  char info[160];
  std::snprintf(info, sizeof info, "printed-form residual %.1e, fitted dipole coefficient %.6f", rep.max_residual,
                rep.fitted_dipole_coefficient.value_or(std::nan("")));
  return {{{"spectrum", rep.spectrum_distance, 1e-6}}, info};
}

Outcome two_d() {
  const LinearizeOptions opt{2, 8};
  TwoDParams p;
  p.nu_y = 1.3;
  p.eta_y = 0.05;
  const auto rep = linearize_2d(p, opt);

  TwoDParams flat = p;
  flat.nu_y = 1.0;
  flat.eta_y = 0.0;
  const auto r2 = linearize_2d(flat, opt);
  IonLaserParams s;
  s.n_fock = p.n_x;
  s.eta0 = p.eta_x;
  const auto single = linearize_single(s, solve_ermakov(ConstantFrequency{1.0}, 1.0, 0.0, {0.0, 2.0}), 1.0, opt);
  const std::size_t nx = p.n_x, ny = p.n_y;
  const ComplexMatrix want =
      kron(single.computed, identity(ny)) + kron(identity(2), kron(identity(nx), number_operator(ny)));
  // Entrywise below the guard band, up to a constant energy shift.
  std::vector<Eigen::Index> idx;
  for (std::size_t q = 0; q < 2; ++q)
    for (std::size_t i = 0; i + 2 < nx; ++i)
      for (std::size_t j = 0; j + 2 < ny; ++j) idx.push_back(static_cast<Eigen::Index>((q * nx + i) * ny + j));
  const auto m = static_cast<Eigen::Index>(idx.size());
  ComplexMatrix d(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) d(i, j) = r2.computed(idx[i], idx[j]) - want(idx[i], idx[j]);
  d.diagonal().array() -= d.diagonal().real().mean();
  char info[96];
  std::snprintf(info, sizeof info, "printed-form residual %.1e", rep.max_residual);
  return {{{"spectrum", rep.spectrum_distance, 1e-6}, {"eta_y=0 vs single ion", max_abs(d), 1e-8}}, info};
}

Outcome slow_atom() {
  const SlowAtomSystem sys;
  const auto psi = gaussian_packet_state(sys, Internal::Excited, 0, 0.5 * sys.grid.length, 0.5);
  const ComplexMatrix t = nonunitary_transform(sys);
  const ComplexMatrix proj = ground_vacuum_projector(sys);
  const auto dim = t.rows();
  const ComplexMatrix free_part = 0.5 * kron(kinetic_operator(sys.grid), identity(2 * sys.n_fock)) * proj;
  const double comm = max_abs(commutator(t.adjoint() * effective_generator(sys) * t, free_part));
  const double exact = max_abs(t.adjoint() * t - (ComplexMatrix::Identity(dim, dim) - proj));
  return {{{"factorized vs direct at t=1", compare_oracle(sys, psi, 1.0), 1e-6},
           {"commutator", comm, 1e-10},
           {"T^dag T - (1 - P_gv)", exact, 0.0}},
          ""};
}

std::string capture(const std::string& cmd, int& code) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome determinism() {
  const std::string cmd = std::string(QXFORM_BIN) + " selftest 2>/dev/null";
  int c1 = 0, c2 = 0;
  const std::string a = capture(cmd, c1);
  const std::string b = capture(cmd, c2);
  const bool same = !a.empty() && a == b && c1 == c2;
  char info[64];
  std::snprintf(info, sizeof info, "%zu bytes, exit %d", a.size(), c1);
  return {{{"byte mismatch", same ? 0.0 : 1.0, 0.0}}, info};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Kerr closed form vs RK4", kerr_differential},
      {"Kerr superoperator algebra", superop_algebra},
      {"Kerr semigroup", semigroup},
      {"Ermakov solver", ermakov},
      {"single-ion linearization", single_ion},
      {"many-ion linearization", many_ion},
      {"2D vibration linearization", two_d},
      {"slow atom factorization", slow_atom},
      {"selftest determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = criteria[i].second();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = std::all_of(o.parts.begin(), o.parts.end(), [](const Part& p) { return p.ok(); });
    if (!ok) ++failed;
    std::string detail;
    for (const auto& p : o.parts) {
      char buf[160];
      if (p.tol == 0.0)
        std::snprintf(buf, sizeof buf, "%s%s %.2e %s 0", detail.empty() ? "" : "; ", p.what.c_str(), p.value,
                      p.ok() ? "==" : "!=");
      else
        std::snprintf(buf, sizeof buf, "%s%s %.2e %s %.0e", detail.empty() ? "" : "; ", p.what.c_str(), p.value,
                      p.ok() ? "<" : ">=", p.tol);
      detail += buf;
    }
    if (!o.info.empty()) detail += "; " + o.info;
    std::printf("%s %zu %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
