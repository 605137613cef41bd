#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nitns/config.hpp"
#include "nitns/diagnostics.hpp"
#include "nitns/errors.hpp"
#include "nitns/experiment.hpp"
#include "nitns/initial.hpp"
#include "nitns/snapshot.hpp"
#include "nitns/spectral_ops.hpp"
#include "support.hpp"

using namespace nitns;
using namespace nitns::test;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "grid.dim = 2\n"
    "grid.n = 32\n"
    "nu = 0.1\n"
    "t_end = 0.1\n"
    "formulation = direct\n"
    "ic = taylor_green\n";

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nitns_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("minimal configuration gets defaults") {
  const ExperimentConfig c = parse_config(kMinimal);
  CHECK(c.dim == 2);
  CHECK(c.n == 32);
  CHECK(c.solver.nu == 0.1);
  CHECK(c.solver.t_end == 0.1);
  CHECK(c.solver.formulation == Formulation::direct);
  CHECK(c.ic.kind == InitialKind::taylor_green);
  CHECK(c.solver.cfl == 0.5);
  CHECK_FALSE(c.solver.dt.has_value());
  CHECK(c.solver.scheme == Scheme::rk4);
  CHECK(c.solver.g == 0.1);
  CHECK(c.solver.s0 == 0.25);
  const ExperimentConfig again = parse_config(format_config(c));
  CHECK(format_config(again) == format_config(c));
}

TEST_CASE("configuration errors name the key and line") {
  const std::string text = kMinimal;
  CHECK(error_of(text + "grid.n = 33\n").find("n must be even power of two") != std::string::npos);
  const std::string neg = error_of(text + "formulation = mollified\nmollifier.delta = -1\n");
  CHECK(neg.find("mollifier.delta") != std::string::npos);
  CHECK(neg.find("line 8") != std::string::npos);
  const std::string unknown = error_of(text + "grid.size = 4\n");
  CHECK(unknown.find("grid.size") != std::string::npos);
  CHECK(unknown.find("line 7") != std::string::npos);
  CHECK(error_of("grid.dim = 2\n").find("missing") != std::string::npos);
  CHECK(error_of(text + "nu = fast\n").find("'nu'") != std::string::npos);
  CHECK(error_of(text, {"grid.n=12"}).find("--set") != std::string::npos);
  CHECK(error_of(text + "formulation = vortex\n").find("mollifier.delta") != std::string::npos);
  CHECK(error_of(text + "ic.kmax = 20\n").find("ic.kmax") != std::string::npos);
  CHECK(parse_config(text, {"grid.n=64"}).n == 64);
}

TEST_CASE("initial conditions") {
  const auto g = Grid::create(2, 32);
  InitialCondition zero;
  zero.amplitude = 0.0;
  CHECK(max_abs(make_initial_velocity(zero, g)) == 0.0);
  zero.kind = InitialKind::random_band;
  CHECK(max_abs(make_initial_velocity(zero, g)) == 0.0);

  const SpectralField tg = make_initial_velocity(InitialCondition{}, g);
  CHECK(max_abs(divergence(tg)) <= 1e-14);
  // Quadrature of 1/2 int (cos^2 x sin^2 y + sin^2 x cos^2 y) over [0, 2 pi)^2.
  CHECK(kinetic_energy(to_physical(tg)) == doctest::Approx(pi * pi).epsilon(1e-14));

  InitialCondition rb;
  rb.kind = InitialKind::random_band;
  rb.seed = 77;
  rb.kmin = 2.0;
  rb.kmax = 5.0;
  rb.amplitude = 3.0;
  const SpectralField a = make_initial_velocity(rb, g);
  const SpectralField b = make_initial_velocity(rb, g);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(kinetic_energy(a) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(max_abs(divergence(a)) <= 1e-12);
  CHECK(std::abs(coefficient(a, 0, {0, 0, 0})) == 0.0);
  rb.seed = 78;
  CHECK(max_abs_diff(make_initial_velocity(rb, g), a) > 0.0);
  rb.r0 = 0.4;
  CHECK(initial_reynolds(make_initial_velocity(rb, g, 0.1), 0.1) == doctest::Approx(0.4).epsilon(1e-12));

  const auto g3 = Grid::create(3, 16);
  InitialCondition abc;
  abc.kind = InitialKind::abc;
  abc.amplitude = 0.5;
  const auto want = sample_physical(g3, 3, [](double x, double y, double z) {
    return std::vector{0.5 * (std::sin(z) + std::cos(y)), 0.5 * (std::sin(x) + std::cos(z)),
                       0.5 * (std::sin(y) + std::cos(x))};
  });
  CHECK(max_abs_diff(make_initial_velocity(abc, g3), want) < 1e-15);
  CHECK_THROWS_AS(make_initial_velocity(abc, g), ConfigError);

  InitialCondition empty;
  empty.kind = InitialKind::random_band;
  empty.kmin = 1.1;
  empty.kmax = 1.2;
  CHECK_THROWS_AS(make_initial_velocity(empty, g), ConfigError);
}

TEST_CASE("snapshot round trip is bit exact") {
  const fs::path dir = scratch("snap");
  ExperimentConfig c = parse_config(std::string(kMinimal) +
                                    "formulation = eulerian_lagrangian\nel.evolve_logdet = true\n");
  c.dim = 3;
  c.n = 16;
  SimState s = make_initial(c);
  s.el->ell = random_field(Grid::create(3, 16), 3, 5, 3.0, 0.01);
  s.el->t = 0.25;
  s.el->t1 = 0.125;
  s.el->restart_count = 3;
  const Snapshot snap = make_snapshot(s, c.solver);
  const std::string path = (dir / "el.bin").string();
  write_snapshot(path, snap);
  const Snapshot back = read_snapshot(path, Formulation::eulerian_lagrangian);
  CHECK(back.t == 0.25);
  CHECK(back.t1 == 0.125);
  CHECK(back.restart_count == 3);
  REQUIRE(back.fields.size() == snap.fields.size());
  for (std::size_t i = 0; i < snap.fields.size(); ++i) {
    REQUIRE(back.fields[i].ncomp() == snap.fields[i].ncomp());
    CHECK(std::equal(back.fields[i].data().begin(), back.fields[i].data().end(),
                     snap.fields[i].data().begin()));
  }
  const SimState r = restore_state(back, Grid::create(3, 16));
  CHECK(r.el->restart_count == 3);
  CHECK(r.el->logdet.has_value());
  CHECK(max_abs_diff(r.el->ell, s.el->ell) < 1e-15);

  CHECK_THROWS_AS(read_snapshot(path, Formulation::direct), SnapshotError);

  // Truncated file.
  const auto size = fs::file_size(path);
  fs::copy_file(path, dir / "cut.bin");
  fs::resize_file(dir / "cut.bin", size - 9);
  CHECK_THROWS_AS(read_snapshot((dir / "cut.bin").string()), SnapshotError);
  fs::resize_file(dir / "cut.bin", 10);
  CHECK_THROWS_AS(read_snapshot((dir / "cut.bin").string()), SnapshotError);

  // Corrupted magic and version.
  {
    std::fstream f(dir / "cut.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
  }
  CHECK_THROWS_AS(read_snapshot((dir / "cut.bin").string()), SnapshotError);
  fs::copy_file(path, dir / "ver.bin");
  {
    std::fstream f(dir / "ver.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    f.put(7);
  }
  CHECK_THROWS_AS(read_snapshot((dir / "ver.bin").string()), SnapshotError);
  CHECK_THROWS_AS(read_snapshot((dir / "missing.bin").string()), SnapshotError);
}

TEST_CASE("run with t_end = 0 writes a single row and the initial snapshot") {
  const fs::path dir = scratch("run0");
  ExperimentConfig c = parse_config(std::string(kMinimal) + "t_end = 0\n");
  c.output_dir = dir.string();
  std::ostringstream out, err;
  CHECK(cmd_run(c, out, err) == kExitOk);
  const auto lines = lines_of(dir / "timeseries.csv");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].rfind("# ", 0) == 0);
  CHECK(lines[1] ==
        "t,K,eps,enstrophy,omega_l1,dir_diss,alpha_max,u_linf,suf1,suf2,maxu,y_gevrey,"
        "budget_residual,max_grad_ell,logdet_err,weber_cauchy_err,restarts,G,rho,tau");
  CHECK(lines[2].rfind("0,", 0) == 0);
  // Columns that do not apply to a direct run are empty.
  CHECK(lines[2].find(",,,,") != std::string::npos);
  const Snapshot s = read_snapshot((dir / "snapshot_initial.bin").string());
  CHECK(s.t == 0.0);
  CHECK(fs::exists(dir / "snapshot_final.bin"));
  CHECK(fs::exists(dir / "config.used"));
}

TEST_CASE("identical configurations give identical time series") {
  ExperimentConfig c = parse_config(std::string(kMinimal) +
                                    "ic.kind = random_band\nic.seed = 4\nic.kmax = 4\n"
                                    "formulation = eulerian_lagrangian\nt_end = 0.05\n");
  std::vector<std::vector<std::string>> runs;
  for (const char* name : {"det_a", "det_b"}) {
    c.output_dir = scratch(name).string();
    std::ostringstream out, err;
    REQUIRE(cmd_run(c, out, err) == kExitOk);
    auto l = lines_of(fs::path(c.output_dir) / "timeseries.csv");
    l.erase(l.begin());
    runs.push_back(l);
  }
  CHECK(runs[0] == runs[1]);
  CHECK(runs[0].size() > 2);
}

TEST_CASE("blow-up keeps partial output and reports its own exit code") {
  const fs::path dir = scratch("blowup");
  // An inviscid run with a huge fixed step and no CFL relief diverges.
  ExperimentConfig c = parse_config(
      "grid.dim = 2\ngrid.n = 16\nnu = 0\nt_end = 50\nformulation = direct\n"
      "ic.kind = random_band\nic.kmax = 5\nic.amplitude = 1e6\ndt = 0.05\ncfl = 1e6\n");
  c.output_dir = dir.string();
  std::ostringstream out, err;
  CHECK(cmd_run(c, out, err) == kExitBlowUp);
  CHECK(lines_of(dir / "timeseries.csv").size() >= 3);
  CHECK(fs::exists(dir / "snapshot_last_good.bin"));
  CHECK(err.str().find("blow-up") != std::string::npos);
}

TEST_CASE("verify runs the algebra suite cleanly") {
  std::ostringstream out;
  CHECK(cmd_verify({"algebra"}, out) == kExitOk);
  CHECK(out.str().find("FAIL") == std::string::npos);
  CHECK(out.str().find("algebra cauchy_identity PASS") != std::string::npos);
  std::ostringstream all;
  CHECK(cmd_verify({"all"}, all) == kExitOk);
  CHECK_THROWS_AS(cmd_verify({"nonsense"}, all), ConfigError);
}

TEST_CASE("compare requires two formulations and reports differences") {
  ExperimentConfig c = parse_config(std::string(kMinimal) + "dt = 0.01\n");
  CHECK_THROWS_AS(compare(c), ConfigError);
  c.compare_formulations = {"direct", "mollified"};
  CHECK_THROWS_AS(compare(c), ConfigError);
  c.compare_deltas = {0.4, 0.2, 0.1};
  c.ic.perturbation = 0.05;
  c.ic.seed = 2;
  const auto rows = compare(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].terminal > rows[1].terminal);
  CHECK(rows[1].terminal > rows[2].terminal);
  for (const auto& r : rows) CHECK(r.running_max >= r.terminal);
  std::ostringstream out;
  CHECK(cmd_compare(c, out) == kExitOk);
  CHECK(out.str().find("monotone_in_delta mollified yes") != std::string::npos);
}

TEST_CASE("restart study reports intervals against g") {
  ExperimentConfig c = parse_config(std::string(kMinimal) +
                                    "formulation = eulerian_lagrangian\ndt = 0.005\nt_end = 0.4\n");
  c.n = 16;
  c.study_g = {0.05, 0.1, 0.2};
  const auto rows = restart_study(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].restarts >= rows[1].restarts);
  CHECK(rows[1].restarts >= rows[2].restarts);
  CHECK(rows[0].restarts > 0);
  CHECK(rows[0].mean_interval <= rows[1].mean_interval);
  CHECK(rows[0].tau_scale == doctest::Approx(0.05 * std::pow(rows[0].G, -7.0)));
  std::ostringstream out;
  CHECK(cmd_restart_study(c, out) == kExitOk);
  CHECK(out.str().find("monotone_in_g taylor_green yes") != std::string::npos);
}
