#pragma once

// JSON-configured entry points behind the command-line tool. Every reader
// validates its target parameter type before any computation and names the
// offending field when it fails.

#include "qxform/ermakov.hpp"
#include "qxform/errors.hpp"
#include "qxform/io.hpp"
#include "qxform/ion_laser.hpp"
#include "qxform/kerr.hpp"
#include "qxform/slow_atom.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qxform {

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t samples = 11;

  // samples >= 2, t1 > t0.
  void validate() const;
  std::vector<double> points() const;
};

// {"t0", "t1", "samples"}; missing keys keep the given defaults.
TimeGrid time_grid_from_json(const Json& j, TimeGrid defaults = {});

// {"type": "constant", "nu0"} | {"type": "quench", "nu1", "nu2", "t_switch"}
// | {"type": "tabulated", "times": [...], "values": [...]}
FrequencySchedule schedule_from_json(const Json& j);

IonLaserParams ion_single_from_json(const Json& j);
ManyIonParams ion_many_from_json(const Json& j);
TwoDParams ion_2d_from_json(const Json& j);
SlowAtomSystem slow_atom_from_json(const Json& j);
StateVector slow_atom_initial_from_json(const SlowAtomSystem& sys, const Json& j);
KerrParams kerr_from_json(const Json& j);
// {"type": "fock", "level"} | {"type": "coherent", "alpha": x or [re, im]}
// | {"type": "matrix", "matrix": {"dim", "entries"}}; default coherent alpha = 1.
DensityMatrix kerr_initial_from_json(const KerrParams& p, const Json& j);

// Schedule config carries the schedule plus optional "rho0", "rho_dot0",
// "nu_ref", "eta0" (default 0.1) and "max_step".
// Columns t,rho,rho_dot,omega_tilde,eta,beta_re,beta_im.
Table ermakov_solve(const Json& cfg, const TimeGrid& grid);

// {max_residual, spectrum_distance, fitted_dipole_coefficient, constant_offset}
Json ion_linearize_check(const std::string& system, const Json& cfg);
// Columns t,infidelity,leakage.
Table ion_dynamics(const Json& cfg, const TimeGrid& grid);

// {deviation, norm, populations: {excited, ground}, t}
Json slow_atom_propagate(const Json& cfg, double t);
// Columns t,deviation,norm,excited,ground.
Table slow_atom_series(const Json& cfg, const TimeGrid& grid);

// {"t", "rho": serialized matrix}
Json kerr_evolve(const Json& cfg, double t);
// Columns t,max_abs_diff,trace_analytic,trace_rk4,min_eig_analytic.
Table kerr_compare(const Json& cfg, const TimeGrid& grid);

struct Check {
  std::string name;
  double residual = 0.0;
  // Informational checks carry no threshold and never fail.
  std::optional<double> threshold;

  bool passed() const { return !threshold || residual < *threshold; }
};

struct RunReport {
  std::string system;
  std::string scenario_hash;
  double wall_time = 0.0;
  std::vector<Check> checks;
  std::vector<std::string> outputs;

  bool passed() const;
  Json to_json(bool with_wall_time = true) const;
};

// FNV-1a (64 bit) of the canonical JSON dump, as 16 hex digits.
std::string scenario_hash(const Json& config);

// {"system", "params", "time": {t0, t1, samples}, "output": {format, path}}
RunReport run_scenario(const Json& config);

// Schema summary printed by --describe.
Json describe_schema();

// 0 ok, 1 check failure, 2 unreadable input, 3 invalid parameters,
// 4 convergence or truncation failure.
int exit_code(ErrorKind kind);

}  // namespace qxform
