#include "nitns/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include <omp.h>

#include "nitns/errors.hpp"
#include "nitns/snapshot.hpp"
#include "nitns/spectral_ops.hpp"
#include "nitns/verification.hpp"

namespace nitns {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_value(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string short_value(double x) {
  if (std::isnan(x)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out_ << "# generated " << timestamp() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out_ << (i ? "," : "") << format_value(values[i]);
    }
    out_ << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

SolverConfig with_formulation(const ExperimentConfig& config, Formulation f, double delta) {
  SolverConfig s = config.solver;
  s.formulation = f;
  if (f == Formulation::mollified || f == Formulation::vortex || f == Formulation::cotangent) {
    Mollifier m = config.solver.mollifier.value_or(Mollifier{});
    m.delta = delta;
    s.mollifier = m;
  }
  return s;
}

bool uses_delta(Formulation f) {
  return f == Formulation::mollified || f == Formulation::vortex || f == Formulation::cotangent;
}

}  // namespace

SimState make_initial(const ExperimentConfig& config) {
  const auto grid = Grid::create(config.dim, config.n);
  const SpectralField u0 = make_initial_velocity(config.ic, grid, config.solver.nu);
  return make_state(config.solver, u0, 0.0);
}

double relative_l2(const SpectralField& a, const SpectralField& b, const SpectralField& ref) {
  SpectralField d = a;
  d -= b;
  const double r = lattice_sum_sq(ref);
  return r > 0.0 ? std::sqrt(lattice_sum_sq(d) / r) : std::sqrt(lattice_sum_sq(d));
}

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream used(dir / "config.used");
    used << format_config(config);
  }
  const SimState initial = make_initial(config);
  if (config.snapshots) {
    write_snapshot((dir / "snapshot_initial.bin").string(), make_snapshot(initial, config.solver));
  }

  CsvWriter series(dir / "timeseries.csv", csv_columns());
  CsvWriter extras(dir / "extras.csv", extra_csv_columns());
  RunHooks hooks;
  hooks.on_record = [&](const DiagnosticsRecord& r, const SimState&) {
    series.row(csv_values(r));
    extras.row(extra_csv_values(r));
  };
  hooks.on_warning = [&](const std::string& msg) { err << "warning: " << msg << '\n'; };
  hooks.on_blowup = [&](const SimState& last_good) {
    if (config.snapshots) {
      write_snapshot((dir / "snapshot_last_good.bin").string(),
                     make_snapshot(last_good, config.solver));
    }
  };

  RunResult result;
  try {
    result = run(config.solver, initial, hooks);
  } catch (const BlowUpError& e) {
    err << "blow-up at t=" << e.time() << ": " << e.what() << '\n';
    return kExitBlowUp;
  }
  if (config.snapshots) {
    write_snapshot((dir / "snapshot_final.bin").string(),
                   make_snapshot(result.final_state, config.solver));
  }
  const NondimNumbers& n = result.numbers;
  const double R0 = initial_reynolds(initial.velocity(), config.solver.nu);
  out << "formulation " << to_string(config.solver.formulation) << '\n'
      << "steps " << result.steps << '\n'
      << "t_final " << short_value(result.final_state.t()) << '\n'
      << "records " << result.records.size() << '\n'
      << "R0 " << short_value(R0) << '\n'
      << "G " << short_value(n.G) << '\n'
      << "rho " << short_value(n.rho) << '\n'
      << "lambda " << short_value(n.lambda) << '\n'
      << "tau " << short_value(n.tau) << '\n';
  if (result.final_state.el) out << "restarts " << result.final_state.el->restart_count << '\n';
  out << "warnings " << result.warnings.size() << '\n'
      << "output " << dir.string() << '\n';
  return kExitOk;
}

std::vector<CompareRow> compare(const ExperimentConfig& config) {
  if (config.compare_formulations.size() < 2) {
    throw ConfigError("key 'compare.formulations': at least two formulations are required");
  }
  std::vector<Formulation> forms;
  for (const auto& f : config.compare_formulations) forms.push_back(parse_formulation(f));
  std::vector<double> deltas = config.compare_deltas;
  if (deltas.empty() && config.solver.mollifier) deltas.push_back(config.solver.mollifier->delta);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (uses_delta(forms[i]) && deltas.empty()) {
      throw ConfigError("key 'compare.deltas': required for formulation " +
                        config.compare_formulations[i]);
    }
  }

  const auto grid = Grid::create(config.dim, config.n);
  const SpectralField u0 = make_initial_velocity(config.ic, grid, config.solver.nu);
  // One shared fixed step so every trajectory samples the same times.
  const double dt = config.solver.dt.value_or(cfl_limit(u0, config.solver.cfl));

  auto trajectory = [&](Formulation f, double delta) {
    SolverConfig s = with_formulation(config, f, delta);
    s.dt = dt;
    std::vector<SpectralField> samples;
    RunHooks hooks;
    hooks.on_record = [&](const DiagnosticsRecord&, const SimState& st) {
      samples.push_back(st.velocity());
    };
    run(s, make_state(s, u0), hooks);
    return samples;
  };

  const Formulation ref_form = forms.front();
  std::map<double, std::vector<SpectralField>> refs;
  auto reference = [&](double delta) -> const std::vector<SpectralField>& {
    const double key = uses_delta(ref_form) ? delta : 0.0;
    auto it = refs.find(key);
    if (it == refs.end()) it = refs.emplace(key, trajectory(ref_form, delta)).first;
    return it->second;
  };

  std::vector<CompareRow> rows;
  for (std::size_t i = 1; i < forms.size(); ++i) {
    const std::vector<double> ds = uses_delta(forms[i]) || uses_delta(ref_form)
                                       ? deltas
                                       : std::vector<double>{0.0};
    for (double delta : ds) {
      const auto& ref = reference(delta);
      const auto other = trajectory(forms[i], delta);
      if (other.size() != ref.size()) throw ConfigError("compare: trajectories sampled differently");
      CompareRow row{config.compare_formulations[i], uses_delta(forms[i]) ? delta : 0.0, 0.0, 0.0};
      for (std::size_t k = 0; k < ref.size(); ++k) {
        const double d = relative_l2(other[k], ref[k], ref[k]);
        row.running_max = std::max(row.running_max, d);
        row.terminal = d;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

int cmd_compare(const ExperimentConfig& config, std::ostream& out) {
  const auto rows = compare(config);
  out << "reference " << config.compare_formulations.front() << '\n';
  out << "formulation,delta,terminal_l2,running_max_l2\n";
  for (const auto& r : rows) {
    out << r.formulation << ',' << format_value(r.delta) << ',' << format_value(r.terminal) << ','
        << format_value(r.running_max) << '\n';
  }
  // Terminal differences should fall as delta shrinks.
  std::map<std::string, std::vector<std::pair<double, double>>> by_form;
  for (const auto& r : rows) {
    if (r.delta > 0.0) by_form[r.formulation].push_back({r.delta, r.terminal});
  }
  for (auto& [name, pts] : by_form) {
    if (pts.size() < 2) continue;
    std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a.first > b.first; });
    bool monotone = true;
    for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i].second < pts[i - 1].second;
    out << "monotone_in_delta " << name << ' ' << (monotone ? "yes" : "no") << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& suites, std::ostream& out) {
  std::vector<std::string> names;
  for (const auto& s : suites) {
    if (s == "all") {
      names.insert(names.end(), verification_suites().begin(), verification_suites().end());
    } else {
      names.push_back(s);
    }
  }
  if (names.empty()) names = verification_suites();
  bool ok = true;
  for (const auto& s : names) {
    const auto results = run_suite(s);
    print_results(results, out);
    for (const auto& r : results) ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitPropertyFailure;
}

std::vector<RestartStudyRow> restart_study(const ExperimentConfig& config) {
  std::vector<double> gs = config.study_g;
  if (gs.empty()) gs.push_back(config.solver.g);
  std::vector<std::string> ics = config.study_ics;
  if (ics.empty()) ics.push_back(to_string(config.ic.kind));

  std::vector<RestartStudyRow> rows;
  for (const auto& ic_name : ics) {
    ExperimentConfig c = config;
    c.ic.kind = parse_initial_kind(ic_name);
    c.solver.formulation = Formulation::eulerian_lagrangian;
    const auto grid = Grid::create(c.dim, c.n);
    const SpectralField u0 = make_initial_velocity(c.ic, grid, c.solver.nu);
    for (double g : gs) {
      c.solver.g = g;
      std::vector<double> resets;
      int seen = 0;
      RunHooks hooks;
      hooks.on_step = [&](const SimState& s) {
        if (s.el->restart_count != seen) {
          seen = s.el->restart_count;
          resets.push_back(s.el->t1);
        }
      };
      const RunResult r = run(c.solver, make_state(c.solver, u0), hooks);
      RestartStudyRow row;
      row.ic = ic_name;
      row.g = g;
      row.restarts = r.final_state.el->restart_count;
      double prev = 0.0, sum = 0.0, mn = kNaN;
      for (double t : resets) {
        const double gap = t - prev;
        sum += gap;
        mn = std::isnan(mn) ? gap : std::min(mn, gap);
        prev = t;
      }
      row.mean_interval = resets.empty() ? kNaN : sum / static_cast<double>(resets.size());
      row.min_interval = mn;
      row.G = r.numbers.G;
      row.tau_scale = g * std::pow(r.numbers.G, -7.0);
      rows.push_back(row);
    }
  }
  return rows;
}

int cmd_restart_study(const ExperimentConfig& config, std::ostream& out) {
  const auto rows = restart_study(config);
  out << "ic,g,restarts,mean_interval,min_interval,G,g_G^-7\n";
  for (const auto& r : rows) {
    out << r.ic << ',' << format_value(r.g) << ',' << r.restarts << ','
        << format_value(r.mean_interval) << ',' << format_value(r.min_interval) << ','
        << format_value(r.G) << ',' << format_value(r.tau_scale) << '\n';
  }
  // A run without restarts counts as an infinite interval.
  std::map<std::string, std::vector<std::pair<double, double>>> by_ic;
  for (const auto& r : rows) {
    const double mean =
        std::isnan(r.mean_interval) ? std::numeric_limits<double>::infinity() : r.mean_interval;
    by_ic[r.ic].push_back({r.g, mean});
  }
  for (auto& [ic, pts] : by_ic) {
    std::sort(pts.begin(), pts.end());
    bool monotone = true;
    for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i].second >= pts[i - 1].second;
    out << "monotone_in_g " << ic << ' ' << (monotone ? "yes" : "no") << '\n';
  }
  return kExitOk;
}

void configure_threads() {
  const char* env = std::getenv("NITNS_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("NITNS_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace nitns
