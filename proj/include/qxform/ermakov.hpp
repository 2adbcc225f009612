#pragma once

// Ermakov equation  rho'' + nu(t)^2 rho = 1 / rho^3  and the time-dependent
// quantities derived from its solution.

#include <complex>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace qxform {

struct ConstantFrequency {
  double nu0;
};

// nu1 for t < t_switch, nu2 from t_switch on.
struct QuenchFrequency {
  double nu1;
  double nu2;
  double t_switch;
};

// Piecewise-linear interpolation of (times, values).
struct TabulatedFrequency {
  std::vector<double> times;
  std::vector<double> values;
};

// Which one-sided limit to take at a discontinuity.
enum class Side { Left, Right };

class FrequencySchedule {
 public:
  using Variant = std::variant<ConstantFrequency, QuenchFrequency, TabulatedFrequency>;

  FrequencySchedule(Variant v);  // NOLINT(google-explicit-constructor)
  FrequencySchedule(ConstantFrequency c) : FrequencySchedule(Variant{c}) {}   // NOLINT
  FrequencySchedule(QuenchFrequency q) : FrequencySchedule(Variant{q}) {}     // NOLINT
  FrequencySchedule(TabulatedFrequency t) : FrequencySchedule(Variant{std::move(t)}) {}  // NOLINT

  double at(double t, Side side = Side::Right) const;
  // Points where nu or its derivative is not smooth.
  std::vector<double> breakpoints() const;
  bool covers(double t0, double t1) const;
  bool is_constant() const { return std::holds_alternative<ConstantFrequency>(v_); }
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

struct ErmakovOptions {
  // Upper bound on the RK4 step, in addition to min(sample spacing) / 8.
  double max_step = 1e-3;
  // Reference frequency nu0 for eta(t) and beta(t); defaults to nu(t0).
  std::optional<double> nu0;
};

// Sampled solution. The RK4 trajectory is kept on its internal grid so that
// values between samples can be recovered by cubic Hermite interpolation.
class ErmakovSolution {
 public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& rho_dot() const { return rho_dot_; }
  double nu0() const { return nu0_; }
  const FrequencySchedule& schedule() const { return schedule_; }

  const std::vector<double>& node_times() const { return node_t_; }
  const std::vector<double>& node_rho() const { return node_rho_; }
  const std::vector<double>& node_rho_dot() const { return node_rho_dot_; }

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }

  double rho_at(double t) const;
  double rho_dot_at(double t) const;

 private:
  friend ErmakovSolution solve_ermakov(const FrequencySchedule&, double, double, std::vector<double>,
                                       const ErmakovOptions&);
  explicit ErmakovSolution(FrequencySchedule s) : schedule_(std::move(s)) {}

  std::size_t interval_of(double t) const;
  double rho_ddot(std::size_t node, Side side) const;

  FrequencySchedule schedule_;
  std::vector<double> times_, rho_, rho_dot_;
  std::vector<double> node_t_, node_rho_, node_rho_dot_;
  double nu0_ = 0.0;
};

// Instantaneous ground-state match: rho = nu(t0)^(-1/2), rho_dot = 0.
struct ErmakovInitial {
  double rho0;
  double rho_dot0;
};
ErmakovInitial default_initial_conditions(const FrequencySchedule& schedule, double t0);

ErmakovSolution solve_ermakov(const FrequencySchedule& schedule, double rho0, double rho_dot0,
                              std::vector<double> times, const ErmakovOptions& options = {});

double derived_frequency(const ErmakovSolution& sol, double t);
double lamb_dicke(const ErmakovSolution& sol, double eta0, double t);
double lamb_dicke_rate(const ErmakovSolution& sol, double eta0, double t);
std::complex<double> beta(const ErmakovSolution& sol, double eta0, double t);

// Integral of omega_tilde from t_begin to t, trapezoid rule over the RK4 nodes.
double phase_integral(const ErmakovSolution& sol, double t);

struct ErmakovResidual {
  double max_residual = 0.0;
  std::size_t checked = 0;
  // Nodes whose five-point stencil straddles a breakpoint of nu(t).
  std::size_t excluded = 0;
};

// |rho'' + nu^2 rho - 1/rho^3| with rho'' from a five-point central
// difference over the RK4 nodes.
ErmakovResidual ermakov_residual(const ErmakovSolution& sol);

// rho_dot^2 + nu^2 rho^2 + 1/rho^2 at every sample; conserved for constant nu.
std::vector<double> first_integral(const ErmakovSolution& sol);

}  // namespace qxform
