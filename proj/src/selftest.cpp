#include "qxform/selftest.hpp"

#include "qxform/lcg.hpp"

#include <algorithm>
#include <cmath>

namespace qxform {

namespace {

double max_over(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void kerr_checks(std::vector<Check>& out) {
  const KerrParams p{0.5, 0.1, 16};
  const ComplexMatrix rho0 = DensityMatrix::from_state(coherent_state(16, 1.0)).matrix();
  std::vector<double> ts;
  for (int i = 0; i <= 10; ++i) ts.push_back(0.5 * i);
  double diff = 0.0, trace = 0.0;
  for (const auto& r : compare(p, rho0, ts, 5000)) {
    diff = std::max(diff, r.max_abs_diff);
    trace = std::max(trace, std::abs(r.trace_analytic - 1.0));
  }
  out.push_back({"kerr.analytic_vs_rk4", diff, 1e-6});
  out.push_back({"kerr.trace", trace, 1e-10});

  Lcg rng(42);
  std::vector<ComplexMatrix> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(random_hermitian(rng, 8));
  const KerrParams small{0.5, 0.1, 8};
  const auto comm = superop_commutator_check(small, samples, 1.0);
  out.push_back({"kerr.commutator_YJ", comm.yj, 1e-12});
  out.push_back({"kerr.commutator_RJ", comm.rj, 1e-12});
  // The quoted coefficient 2 is reported, not enforced.
  out.push_back({"kerr.commutator_YJ_coefficient_2", superop_commutator_check(small, samples, 2.0).yj, std::nullopt});

  double semi = 0.0;
  for (auto [a, b] : {std::pair{0.3, 0.7}, {1.0, 1.0}, {2.0, 0.5}})
    semi = std::max(semi, max_abs(analytic_solution(p, analytic_solution(p, rho0, a), b) -
                                  analytic_solution(p, rho0, a + b)));
  out.push_back({"kerr.semigroup", semi, 1e-9});
}

void ermakov_checks(std::vector<Check>& out) {
  std::vector<double> ts;
  for (int i = 0; i <= 50; ++i) ts.push_back(0.1 * i);

  const FrequencySchedule constant = ConstantFrequency{1.0};
  const auto fixed = solve_ermakov(constant, 1.0, 0.0, ts);
  out.push_back({"ermakov.residual_constant", ermakov_residual(fixed).max_residual, 1e-8});
  out.push_back({"ermakov.fixed_point", max_over(fixed.rho(), std::vector<double>(ts.size(), 1.0)), 1e-8});

  const auto quench = solve_ermakov(QuenchFrequency{1.0, 2.0, 1.0}, 1.0, 0.0, ts);
  out.push_back({"ermakov.residual_quench", ermakov_residual(quench).max_residual, 1e-8});

  const auto tab = solve_ermakov(TabulatedFrequency{{0.0, 2.0, 5.0}, {1.0, 1.5, 0.8}}, 1.0, 0.0, ts);
  out.push_back({"ermakov.residual_tabulated", ermakov_residual(tab).max_residual, 1e-8});

  const auto free = solve_ermakov(TabulatedFrequency{{0.0, 5.0}, {0.0, 0.0}}, 1.0, 0.0, ts);
  std::vector<double> exact;
  for (double t : ts) exact.push_back(std::sqrt(1.0 + t * t));
  out.push_back({"ermakov.free_closed_form", max_over(free.rho(), exact), 1e-8});

  const auto e = first_integral(solve_ermakov(constant, 1.3, 0.0, ts));
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  out.push_back({"ermakov.first_integral", *hi - *lo, 1e-8});
}

void ion_checks(std::vector<Check>& out) {
  IonLaserParams p;
  const auto sol = solve_ermakov(ConstantFrequency{1.0}, 1.0, 0.0, {0.0, 2.0});
  const auto single = linearize_single(p, sol, 1.0);
  out.push_back({"ion.single_residual", single.max_residual, 1e-8});
  out.push_back({"ion.single_spectrum", single.spectrum_distance, 1e-6});
  ComplexVector g0 = ComplexVector::Zero(2 * static_cast<Eigen::Index>(p.n_fock));
  g0(static_cast<Eigen::Index>(p.n_fock)) = 1.0;
  out.push_back({"ion.single_dynamics", dynamics_equivalence(p, sol, StateVector(g0), 2.0, 1000), 1e-6});

  ManyIonParams many;
  many.rabis = {1.0, 1.0};
  many.etas = {0.1, 0.1};
  const auto m = linearize_many(many);
  out.push_back({"ion.many_spectrum", m.spectrum_distance, 1e-6});
  out.push_back({"ion.many_printed_residual", m.max_residual, std::nullopt});
  out.push_back({"ion.many_fitted_dipole", m.fitted_dipole_coefficient.value_or(0.0), std::nullopt});

  TwoDParams two;
  two.nu_y = 1.3;
  two.eta_y = 0.05;
  const auto d = linearize_2d(two, LinearizeOptions{2, 8});
  out.push_back({"ion.2d_spectrum", d.spectrum_distance, 1e-6});
  out.push_back({"ion.2d_printed_residual", d.max_residual, std::nullopt});
}

void slow_atom_checks(std::vector<Check>& out) {
  const SlowAtomSystem sys;
  const auto psi = gaussian_packet_state(sys, Internal::Excited, 0, 0.5 * sys.grid.length, 0.5);
  out.push_back({"slow_atom.factorized_vs_direct", compare_oracle(sys, psi, 1.0), 1e-6});
  const ComplexMatrix t = nonunitary_transform(sys);
  const ComplexMatrix proj = ground_vacuum_projector(sys);
  const ComplexMatrix id = identity(static_cast<std::size_t>(t.rows()));
  out.push_back({"slow_atom.TdagT", max_abs(t.adjoint() * t - (id - proj)), 1e-14});
  const ComplexMatrix free_part = 0.5 * kron(kinetic_operator(sys.grid), identity(2 * sys.n_fock)) * proj;
  out.push_back({"slow_atom.commutator",
                 max_abs(commutator(t.adjoint() * effective_generator(sys) * t, free_part)), 1e-10});
}

}  // namespace

std::vector<Check> selftest_checks() {
  std::vector<Check> out;
  kerr_checks(out);
  ermakov_checks(out);
  ion_checks(out);
  slow_atom_checks(out);
  return out;
}

Json selftest_report(const std::vector<Check>& checks) {
  RunReport r;
  r.system = "selftest";
  r.checks = checks;
  Json j = r.to_json(false);
  j.erase("scenario_hash");
  j.erase("outputs");
  return j;
}

}  // namespace qxform
