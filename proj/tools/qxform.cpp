// qxform: command-line front end for the transformation checks.
//
// Exit codes: 0 ok, 1 a check failed, 2 unreadable input or bad usage,
// 3 invalid parameters, 4 convergence or truncation failure.

#include "qxform/scenario.hpp"
#include "qxform/selftest.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

using qxform::Json;

struct TimeFlags {
  std::optional<double> t0, t1;
  std::optional<std::size_t> samples;
};

void add_time_flags(CLI::App* cmd, TimeFlags& tf) {
  cmd->add_option("--t0", tf.t0, "start time");
  cmd->add_option("--t1", tf.t1, "end time");
  cmd->add_option("--samples", tf.samples, "number of output samples (>= 2)");
}

// Command-line values win over the same keys in the config.
qxform::TimeGrid time_grid(const Json& cfg, const TimeFlags& tf) {
  Json j = Json::object();
  for (const char* k : {"t0", "t1", "samples"})
    if (cfg.contains(k)) j[k] = cfg[k];
  if (tf.t0) j["t0"] = *tf.t0;
  if (tf.t1) j["t1"] = *tf.t1;
  if (tf.samples) j["samples"] = *tf.samples;
  return qxform::time_grid_from_json(j);
}

double single_time(const Json& cfg, const std::optional<double>& flag) {
  if (flag) return *flag;
  if (cfg.contains("t") && cfg["t"].is_number()) return cfg["t"].get<double>();
  qxform::fail(qxform::ErrorKind::Parameter, "t: give --t or \"t\" in the config");
}

Json config_or_empty(const std::string& arg) { return arg.empty() ? Json::object() : qxform::load_json(arg); }

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const auto path = qxform::resolve_output(out);
  qxform::write_text(path, text);
  std::cerr << "wrote " << path.string() << "\n";
}

void summarize(const std::vector<qxform::Check>& checks) {
  for (const auto& c : checks) {
    std::fprintf(stderr, "%-4s %-36s %.3e", c.passed() ? "ok" : "FAIL", c.name.c_str(), c.residual);
    if (c.threshold) std::fprintf(stderr, "  (< %.0e)", *c.threshold);
    std::fprintf(stderr, "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qxform: exact transformations of driven and open quantum oscillators"};
  app.require_subcommand(1);
  bool describe = false;
  app.add_flag("--describe", describe, "print the scenario config schema and exit");

  std::string config, out, schedule, system = "single";
  TimeFlags tf;
  std::optional<double> t_flag;
  int status = 0;
  std::function<void()> action;

  auto* ermakov = app.add_subcommand("ermakov", "Ermakov equation");
  ermakov->require_subcommand(1);
  auto* solve = ermakov->add_subcommand("solve", "solve and tabulate rho, omega_tilde, eta, beta");
  solve->add_option("--schedule", schedule, "schedule JSON (inline or file)");
  solve->add_option("--config", config, "same as --schedule");
  solve->add_option("--out", out, "output CSV (default stdout)");
  add_time_flags(solve, tf);
  solve->callback([&] {
    action = [&] {
      const Json cfg = config_or_empty(schedule.empty() ? config : schedule);
      emit(qxform::ermakov_solve(cfg, time_grid(cfg, tf)).to_csv(), out);
    };
  });

  auto* ion = app.add_subcommand("ion", "trapped-ion linearizations");
  ion->require_subcommand(1);
  auto* lin = ion->add_subcommand("linearize-check", "compare printed linearized forms with direct conjugation");
  lin->add_option("--system", system, "single | many | 2d")->check(CLI::IsMember({"single", "many", "2d"}));
  lin->add_option("--config", config, "parameter JSON (inline or file)");
  lin->add_option("--t", t_flag, "time for the single-ion check");
  lin->add_option("--out", out, "output JSON (default stdout)");
  lin->callback([&] {
    action = [&] {
      Json cfg = config_or_empty(config);
      if (t_flag) cfg["t"] = *t_flag;
      emit(qxform::ion_linearize_check(system, cfg).dump(2) + "\n", out);
    };
  });
  auto* dyn = ion->add_subcommand("dynamics", "infidelity between the original and linearized evolutions");
  dyn->add_option("--config", config, "parameter JSON (inline or file)");
  dyn->add_option("--out", out, "output CSV (default stdout)");
  add_time_flags(dyn, tf);
  dyn->callback([&] {
    action = [&] {
      const Json cfg = config_or_empty(config);
      emit(qxform::ion_dynamics(cfg, time_grid(cfg, tf)).to_csv(), out);
    };
  });

  auto* slow = app.add_subcommand("slow-atom", "slow atom crossing a cavity");
  slow->require_subcommand(1);
  auto* prop = slow->add_subcommand("propagate", "factorized propagator against direct exponentiation");
  prop->add_option("--config", config, "parameter JSON (inline or file)");
  prop->add_option("--t", t_flag, "final time");
  prop->add_option("--samples", tf.samples, "also write a CSV series on [0, t]");
  prop->add_option("--csv", out, "series CSV path (default stdout after the JSON)");
  prop->callback([&] {
    action = [&] {
      const Json cfg = config_or_empty(config);
      const double t = single_time(cfg, t_flag);
      std::cout << qxform::slow_atom_propagate(cfg, t).dump(2) << "\n";
      if (tf.samples) {
        qxform::TimeGrid g{0.0, t, *tf.samples};
        emit(qxform::slow_atom_series(cfg, g).to_csv(), out);
      }
    };
  });

  auto* kerr = app.add_subcommand("kerr", "lossy Kerr master equation");
  kerr->require_subcommand(1);
  auto* evolve = kerr->add_subcommand("evolve", "closed-form density matrix at time t");
  evolve->add_option("--config", config, "parameter JSON (inline or file)")->required();
  evolve->add_option("--t", t_flag, "time");
  evolve->add_option("--out", out, "output JSON (default stdout)");
  evolve->callback([&] {
    action = [&] {
      const Json cfg = qxform::load_json(config);
      emit(qxform::kerr_evolve(cfg, single_time(cfg, t_flag)).dump() + "\n", out);
    };
  });
  auto* cmp = kerr->add_subcommand("compare", "closed form against RK4");
  cmp->add_option("--config", config, "parameter JSON (inline or file)")->required();
  cmp->add_option("--out", out, "output CSV (default stdout)");
  add_time_flags(cmp, tf);
  cmp->callback([&] {
    action = [&] {
      const Json cfg = qxform::load_json(config);
      emit(qxform::kerr_compare(cfg, time_grid(cfg, tf)).to_csv(), out);
    };
  });

  auto* self = app.add_subcommand("selftest", "run the fixed invariant suite");
  self->add_option("--out", out, "report JSON (default stdout)");
  self->callback([&] {
    action = [&] {
      const auto checks = qxform::selftest_checks();
      summarize(checks);
      const Json report = qxform::selftest_report(checks);
      emit(report.dump(2) + "\n", out);
      if (!report["passed"].get<bool>()) status = 1;
    };
  });

  auto* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("--config", config, "scenario JSON (inline or file)");
  run->add_flag("--describe", describe, "print the config schema and exit");
  run->callback([&] {
    action = [&] {
      if (config.empty()) qxform::fail(qxform::ErrorKind::Io, "run: --config is required");
      const auto report = qxform::run_scenario(qxform::load_json(config));
      summarize(report.checks);
      std::cout << report.to_json().dump(2) << "\n";
      if (!report.passed()) status = 1;
    };
  });

  // --describe needs no subcommand.
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--describe") {
      std::cout << qxform::describe_schema().dump(2) << "\n";
      return 0;
    }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (action) action();
  } catch (const qxform::Error& e) {
    std::cerr << "qxform: " << qxform::to_string(e.kind()) << " error: " << e.what() << "\n";
    return qxform::exit_code(e.kind());
  } catch (const Json::exception& e) {
    std::cerr << "qxform: config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "qxform: " << e.what() << "\n";
    return 4;
  }
  return status;
}
