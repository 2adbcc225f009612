#include "qxform/ermakov.hpp"

#include "qxform/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace qxform {

namespace {

constexpr double kRhoFloor = 1e-6;

void require_increasing(const std::vector<double>& t, const char* what) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) fail(ErrorKind::Parameter, std::string(what) + " must be strictly increasing");
}

// Fornberg weights for the second derivative at x0 over five nodes.
std::array<double, 5> second_derivative_weights(double x0, const std::array<double, 5>& x) {
  constexpr int n = 5;
  constexpr int m = 2;
  double c[n][m + 1] = {};
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0] - x0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::array<double, 5> w{};
  for (int j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

double ermakov_accel(double nu, double rho) { return 1.0 / (rho * rho * rho) - nu * nu * rho; }

}  // namespace

FrequencySchedule::FrequencySchedule(Variant v) : v_(std::move(v)) {
  if (const auto* c = std::get_if<ConstantFrequency>(&v_)) {
    if (!(c->nu0 > 0.0)) fail(ErrorKind::Parameter, "constant schedule needs nu0 > 0");
  } else if (const auto* q = std::get_if<QuenchFrequency>(&v_)) {
    if (!(q->nu1 > 0.0) || !(q->nu2 > 0.0)) fail(ErrorKind::Parameter, "quench schedule needs nu1, nu2 > 0");
    if (!std::isfinite(q->t_switch)) fail(ErrorKind::Parameter, "quench t_switch must be finite");
  } else {
    const auto& tab = std::get<TabulatedFrequency>(v_);
    if (tab.times.size() < 2 || tab.times.size() != tab.values.size())
      fail(ErrorKind::Parameter, "tabulated schedule needs >= 2 (time, value) pairs of equal length");
    require_increasing(tab.times, "tabulated schedule times");
    for (double v : tab.values)
      if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::Parameter, "tabulated frequencies must be finite and >= 0");
  }
}

double FrequencySchedule::at(double t, Side side) const {
  if (const auto* c = std::get_if<ConstantFrequency>(&v_)) return c->nu0;
  if (const auto* q = std::get_if<QuenchFrequency>(&v_)) {
    if (t < q->t_switch) return q->nu1;
    if (t > q->t_switch) return q->nu2;
    return side == Side::Left ? q->nu1 : q->nu2;
  }
  const auto& tab = std::get<TabulatedFrequency>(v_);
  const double slack = 1e-12 * std::max(1.0, std::abs(tab.times.back() - tab.times.front()));
  if (t < tab.times.front() - slack || t > tab.times.back() + slack)
    fail(ErrorKind::OutOfRange, "time " + std::to_string(t) + " outside tabulated schedule");
  t = std::clamp(t, tab.times.front(), tab.times.back());
  auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - tab.times.begin());
  if (hi >= tab.times.size()) return tab.values.back();
  if (hi == 0) return tab.values.front();
  const std::size_t lo = hi - 1;
  const double w = (t - tab.times[lo]) / (tab.times[hi] - tab.times[lo]);
  return (1.0 - w) * tab.values[lo] + w * tab.values[hi];
}

std::vector<double> FrequencySchedule::breakpoints() const {
  if (const auto* q = std::get_if<QuenchFrequency>(&v_)) return {q->t_switch};
  if (const auto* tab = std::get_if<TabulatedFrequency>(&v_)) return tab->times;
  return {};
}

bool FrequencySchedule::covers(double t0, double t1) const {
  if (const auto* tab = std::get_if<TabulatedFrequency>(&v_)) {
    const double slack = 1e-12 * std::max(1.0, std::abs(tab->times.back() - tab->times.front()));
    return t0 >= tab->times.front() - slack && t1 <= tab->times.back() + slack;
  }
  return true;
}

ErmakovInitial default_initial_conditions(const FrequencySchedule& schedule, double t0) {
  const double nu = schedule.at(t0, Side::Right);
  if (!(nu > 0.0)) fail(ErrorKind::Parameter, "default initial conditions need nu(t0) > 0; give rho0 explicitly");
  return {1.0 / std::sqrt(nu), 0.0};
}

ErmakovSolution solve_ermakov(const FrequencySchedule& schedule, double rho0, double rho_dot0,
                              std::vector<double> times, const ErmakovOptions& options) {
  if (times.size() < 2) fail(ErrorKind::Parameter, "need at least two sample times");
  require_increasing(times, "sample times");
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) fail(ErrorKind::Parameter, "rho0 must be positive");
  if (!std::isfinite(rho_dot0)) fail(ErrorKind::Parameter, "rho_dot0 must be finite");
  if (!(options.max_step > 0.0)) fail(ErrorKind::Parameter, "max_step must be positive");
  if (!schedule.covers(times.front(), times.back()))
    fail(ErrorKind::OutOfRange, "frequency schedule does not cover the requested time range");

  ErmakovSolution sol(schedule);
  sol.times_ = times;
  sol.nu0_ = options.nu0 ? *options.nu0 : schedule.at(times.front(), Side::Right);
  if (!(sol.nu0_ >= 0.0)) fail(ErrorKind::Parameter, "reference frequency must be >= 0");

  double min_gap = times[1] - times[0];
  for (std::size_t i = 2; i < times.size(); ++i) min_gap = std::min(min_gap, times[i] - times[i - 1]);
  const double h_cap = std::min(options.max_step, min_gap / 8.0);

  // Align RK4 nodes with every sample and every schedule breakpoint.
  std::vector<double> marks = times;
  for (double b : schedule.breakpoints())
    if (b > times.front() && b < times.back()) marks.push_back(b);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  double rho = rho0;
  double rdot = rho_dot0;
  sol.node_t_.push_back(marks.front());
  sol.node_rho_.push_back(rho);
  sol.node_rho_dot_.push_back(rdot);

  for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
    const double a = marks[k];
    const double b = marks[k + 1];
    const auto nsub = static_cast<std::size_t>(std::ceil((b - a) / h_cap - 1e-9));
    const double h = (b - a) / static_cast<double>(nsub);
    auto nu_in = [&](double t) { return schedule.at(std::clamp(t, a, b), t >= b ? Side::Left : Side::Right); };
    for (std::size_t s = 0; s < nsub; ++s) {
      const double t = a + h * static_cast<double>(s);
      const double t_mid = t + 0.5 * h;
      const double t_end = (s + 1 == nsub) ? b : t + h;
      const double k1r = rdot;
      const double k1v = ermakov_accel(nu_in(t), rho);
      const double k2r = rdot + 0.5 * h * k1v;
      const double k2v = ermakov_accel(nu_in(t_mid), rho + 0.5 * h * k1r);
      const double k3r = rdot + 0.5 * h * k2v;
      const double k3v = ermakov_accel(nu_in(t_mid), rho + 0.5 * h * k2r);
      const double k4r = rdot + h * k3v;
      const double k4v = ermakov_accel(nu_in(t_end), rho + h * k3r);
      rho += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
      rdot += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!(rho > kRhoFloor) || !std::isfinite(rdot))
        fail(ErrorKind::Singularity, "Ermakov solution reached rho <= 1e-6 near t = " + std::to_string(t_end));
      sol.node_t_.push_back(t_end);
      sol.node_rho_.push_back(rho);
      sol.node_rho_dot_.push_back(rdot);
    }
  }

  sol.rho_.reserve(times.size());
  sol.rho_dot_.reserve(times.size());
  std::size_t node = 0;
  for (double t : times) {
    while (sol.node_t_[node] != t) ++node;
    sol.rho_.push_back(sol.node_rho_[node]);
    sol.rho_dot_.push_back(sol.node_rho_dot_[node]);
  }
  return sol;
}

std::size_t ErmakovSolution::interval_of(double t) const {
  const double span = node_t_.back() - node_t_.front();
  const double slack = 1e-12 * std::max(1.0, span);
  if (t < node_t_.front() - slack || t > node_t_.back() + slack)
    fail(ErrorKind::OutOfRange, "time " + std::to_string(t) + " outside Ermakov solution range");
  auto it = std::upper_bound(node_t_.begin(), node_t_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - node_t_.begin());
  hi = std::clamp<std::size_t>(hi, 1, node_t_.size() - 1);
  return hi - 1;
}

double ErmakovSolution::rho_ddot(std::size_t node, Side side) const {
  return ermakov_accel(schedule_.at(node_t_[node], side), node_rho_[node]);
}

double ErmakovSolution::rho_at(double t) const {
  const std::size_t i = interval_of(t);
  const double h = node_t_[i + 1] - node_t_[i];
  const double s = std::clamp((t - node_t_[i]) / h, 0.0, 1.0);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * node_rho_[i] + h10 * h * node_rho_dot_[i] + h01 * node_rho_[i + 1] + h11 * h * node_rho_dot_[i + 1];
}

double ErmakovSolution::rho_dot_at(double t) const {
  const std::size_t i = interval_of(t);
  const double h = node_t_[i + 1] - node_t_[i];
  const double s = std::clamp((t - node_t_[i]) / h, 0.0, 1.0);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * node_rho_dot_[i] + h10 * h * rho_ddot(i, Side::Right) + h01 * node_rho_dot_[i + 1] +
         h11 * h * rho_ddot(i + 1, Side::Left);
}

double derived_frequency(const ErmakovSolution& sol, double t) {
  const double r = sol.rho_at(t);
  return 1.0 / (r * r);
}

double lamb_dicke(const ErmakovSolution& sol, double eta0, double t) {
  if (!(eta0 >= 0.0)) fail(ErrorKind::Parameter, "eta0 must be >= 0");
  return eta0 * sol.rho_at(t) * std::sqrt(sol.nu0());
}

double lamb_dicke_rate(const ErmakovSolution& sol, double eta0, double t) {
  if (!(eta0 >= 0.0)) fail(ErrorKind::Parameter, "eta0 must be >= 0");
  return eta0 * sol.rho_dot_at(t) * std::sqrt(sol.nu0());
}

std::complex<double> beta(const ErmakovSolution& sol, double eta0, double t) {
  const double eta = lamb_dicke(sol, eta0, t);
  const double eta_dot = lamb_dicke_rate(sol, eta0, t);
  return {0.5 * eta * derived_frequency(sol, t), -0.5 * eta_dot};
}

double phase_integral(const ErmakovSolution& sol, double t) {
  const auto& nt = sol.node_times();
  const auto& nr = sol.node_rho();
  if (t <= nt.front()) {
    (void)sol.rho_at(t);  // range check
    return 0.0;
  }
  double acc = 0.0;
  std::size_t i = 0;
  for (; i + 1 < nt.size() && nt[i + 1] <= t; ++i) {
    const double w0 = 1.0 / (nr[i] * nr[i]);
    const double w1 = 1.0 / (nr[i + 1] * nr[i + 1]);
    acc += 0.5 * (nt[i + 1] - nt[i]) * (w0 + w1);
  }
  if (i + 1 < nt.size() && t > nt[i]) {
    const double w0 = 1.0 / (nr[i] * nr[i]);
    acc += 0.5 * (t - nt[i]) * (w0 + derived_frequency(sol, t));
  } else if (i + 1 == nt.size() && t > nt.back()) {
    (void)sol.rho_at(t);
  }
  return acc;
}

ErmakovResidual ermakov_residual(const ErmakovSolution& sol) {
  const auto& t = sol.node_times();
  const auto& r = sol.node_rho();
  const auto bps = sol.schedule().breakpoints();
  ErmakovResidual out;
  for (std::size_t i = 2; i + 2 < t.size(); ++i) {
    const bool straddles = std::any_of(bps.begin(), bps.end(), [&](double b) { return b > t[i - 2] && b < t[i + 2]; });
    if (straddles) {
      ++out.excluded;
      continue;
    }
    const std::array<double, 5> x{t[i - 2], t[i - 1], t[i], t[i + 1], t[i + 2]};
    const auto w = second_derivative_weights(t[i], x);
    double rdd = 0.0;
    for (int j = 0; j < 5; ++j) rdd += w[j] * r[i - 2 + j];
    const double nu = sol.schedule().at(t[i]);
    const double res = std::abs(rdd + nu * nu * r[i] - 1.0 / (r[i] * r[i] * r[i]));
    out.max_residual = std::max(out.max_residual, res);
    ++out.checked;
  }
  return out;
}

std::vector<double> first_integral(const ErmakovSolution& sol) {
  std::vector<double> e;
  e.reserve(sol.times().size());
  for (std::size_t i = 0; i < sol.times().size(); ++i) {
    const double nu = sol.schedule().at(sol.times()[i]);
    const double r = sol.rho()[i];
    const double rd = sol.rho_dot()[i];
    e.push_back(rd * rd + nu * nu * r * r + 1.0 / (r * r));
  }
  return e;
}

}  // namespace qxform
