#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qxform/errors.hpp"
#include "qxform/io.hpp"
#include "qxform/lcg.hpp"
#include "qxform/scenario.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace qxform;
namespace fs = std::filesystem;

namespace {

bool throws_kind(ErrorKind kind, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

struct Result {
  int code = -1;
  std::string out;
};

// Runs the qxform binary; stderr is discarded.
Result run(const std::string& args) {
  const std::string cmd = std::string(QXFORM_BIN) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "qxform_test_cli";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("matrix JSON round trip") {
  Lcg rng(7);
  const ComplexMatrix m = random_hermitian(rng, 5);
  const Json j = matrix_to_json(m);
  CHECK(j["dim"] == 5);
  CHECK(j["entries"].size() == 25);
  CHECK(max_abs(matrix_from_json(Json::parse(j.dump())) - m) == 0.0);
  CHECK(throws_kind(ErrorKind::Parameter, [] { matrix_from_json(Json{{"dim", 2}}); }));
  CHECK(throws_kind(ErrorKind::InvalidDimension, [] {
    matrix_from_json(Json::parse(R"({"dim": 2, "entries": [[1, 0]]})"));
  }));
}

TEST_CASE("numbers and tables") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-0.0) == "0");
  Table t;
  t.header = {"t", "value"};
  CHECK(t.to_csv() == "t,value\n");
  t.rows = {{0.0, 0.5}, {1.0, -2.0}};
  CHECK(t.to_csv() == "t,value\n0,0.5\n1,-2\n");
}

TEST_CASE("file access") {
  CHECK(throws_kind(ErrorKind::Io, [] { read_text("/nonexistent/qxform/file.json"); }));
  CHECK(throws_kind(ErrorKind::Io, [] { load_json("{not json"); }));
  CHECK(load_json(R"({"a": 1})")["a"] == 1);
  const fs::path p = scratch_dir() / "cfg.json";
  write_text(p, R"({"chi": 0.5})");
  CHECK(load_json(p.string())["chi"] == 0.5);
}

TEST_CASE("config readers name the offending field") {
  try {
    kerr_from_json(Json{{"chi", 0.1}, {"gamma", -1.0}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parameter);
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
  CHECK(throws_kind(ErrorKind::Parameter, [] { kerr_from_json(Json{{"chi", 0.1}, {"gama", 0.1}}); }));
  CHECK(throws_kind(ErrorKind::Parameter, [] { time_grid_from_json(Json{{"samples", 1}}); }));
  CHECK(throws_kind(ErrorKind::Parameter, [] { schedule_from_json(Json{{"type", "ramp"}}); }));
  const auto g = time_grid_from_json(Json{{"t0", 1.0}, {"t1", 2.0}, {"samples", 3}});
  CHECK(g.points() == std::vector<double>{1.0, 1.5, 2.0});
}

TEST_CASE("tables from library entry points") {
  const Json kerr{{"chi", 0.5}, {"gamma", 0.1}, {"n_fock", 10}, {"steps", 2000}};
  const Table c = kerr_compare(kerr, TimeGrid{0.0, 1.0, 3});
  CHECK(first_line(c.to_csv()) == "t,max_abs_diff,trace_analytic,trace_rk4,min_eig_analytic");
  REQUIRE(c.rows.size() == 3);
  for (const auto& r : c.rows) CHECK(r[1] < 1e-10);

  const Table d = ion_dynamics(Json{{"n_fock", 16}, {"steps", 50}}, TimeGrid{0.0, 1.0, 3});
  CHECK(first_line(d.to_csv()) == "t,infidelity,leakage");
  for (const auto& r : d.rows) CHECK(r[1] < 1e-6);

  const Table e = ermakov_solve(Json{{"type", "constant"}, {"nu0", 1.0}}, TimeGrid{0.0, 1.0, 5});
  CHECK(first_line(e.to_csv()) == "t,rho,rho_dot,omega_tilde,eta,beta_re,beta_im");
  for (const auto& r : e.rows) CHECK(std::abs(r[1] - 1.0) < 1e-12);
}

TEST_CASE("scenario runs") {
  const fs::path dir = scratch_dir();
  ::setenv("QXFORM_OUT", dir.c_str(), 1);
  const Json cfg{{"system", "kerr"},
                 {"params", {{"chi", 0.3}, {"gamma", 0.1}, {"n_fock", 8}, {"steps", 500}}},
                 {"time", {{"t0", 0.0}, {"t1", 1.0}, {"samples", 3}}},
                 {"output", {{"format", "csv"}, {"path", "kerr_run.csv"}}}};
  fs::remove(dir / "kerr_run.csv");
  const auto report = run_scenario(cfg);
  CHECK(report.passed());
  REQUIRE(report.outputs.size() == 1);
  CHECK(fs::path(report.outputs[0]) == dir / "kerr_run.csv");
  CHECK(first_line(read_text(dir / "kerr_run.csv")) == "t,max_abs_diff,trace_analytic,trace_rk4,min_eig_analytic");

  CHECK(scenario_hash(cfg) == run_scenario(cfg).scenario_hash);
  CHECK(scenario_hash(cfg).size() == 16);
  Json other = cfg;
  other["params"]["chi"] = 0.31;
  CHECK(scenario_hash(other) != scenario_hash(cfg));
  CHECK_FALSE(report.to_json(false).contains("wall_time"));

  Json json_out = cfg;
  json_out["output"] = {{"format", "json"}, {"path", "kerr_run.json"}};
  run_scenario(json_out);
  const Json written = load_json((dir / "kerr_run.json").string());
  CHECK(written["series"]["rows"].size() == 3);

  CHECK(throws_kind(ErrorKind::Parameter, [&] {
    Json bad = cfg;
    bad["system"] = "pendulum";
    run_scenario(bad);
  }));
  CHECK(throws_kind(ErrorKind::Parameter, [&] {
    Json bad = cfg;
    bad["extra"] = 1;
    run_scenario(bad);
  }));
  ::unsetenv("QXFORM_OUT");
}

TEST_CASE("command-line exit codes") {
  CHECK(run("--describe").code == 0);
  CHECK(run("kerr compare --config '{\"chi\":0.3,\"gamma\":0.1,\"n_fock\":8,\"steps\":500}' --t1 1 --samples 3").code == 0);
  CHECK(run("kerr compare --config /nonexistent/qxform.json").code == 2);
  CHECK(run("kerr compare --config '{\"chi\":0.3,'").code == 2);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("kerr compare --config '{\"chi\":0.3,\"gamma\":-0.1}'").code == 3);
  CHECK(run("ion linearize-check --system many --config '{\"rabis\":[1],\"etas\":[0.1,0.2]}'").code == 3);
  // The top Fock level is occupied from the start.
  CHECK(run("slow-atom propagate --config '{\"n_fock\":4,\"initial\":{\"level\":3}}' --t 1").code == 4);

  const auto a = run("kerr evolve --config '{\"chi\":0.3,\"gamma\":0.1,\"n_fock\":4}' --t 0.5");
  CHECK(a.code == 0);
  const Json j = Json::parse(a.out);
  CHECK(j["rho"]["dim"] == 4);
  CHECK(a.out == run("kerr evolve --config '{\"chi\":0.3,\"gamma\":0.1,\"n_fock\":4}' --t 0.5").out);
}
