#include "nitns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nitns/errors.hpp"

namespace nitns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.dim",
       [](ExperimentConfig& c, const std::string& v) {
         const auto d = to_integer(v);
         if (d != 2 && d != 3) throw ConfigError("dim must be 2 or 3");
         c.dim = static_cast<int>(d);
       }},
      {"grid.n",
       [](ExperimentConfig& c, const std::string& v) {
         const auto n = to_integer(v);
         if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("n must be even power of two (>= 8)");
         c.n = static_cast<int>(n);
       }},
      {"nu",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.nu = to_double(v);
         if (!(c.solver.nu >= 0.0)) throw ConfigError("nu must be >= 0");
       }},
      {"dt",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.dt = to_double(v);
         if (!(*c.solver.dt > 0.0)) throw ConfigError("dt must be > 0");
       }},
      {"cfl",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.cfl = to_double(v);
         if (!(c.solver.cfl > 0.0)) throw ConfigError("cfl must be > 0");
       }},
      {"t_end",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.t_end = to_double(v);
         if (!(c.solver.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
       }},
      {"formulation",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.formulation = parse_formulation(v);
       }},
      {"scheme",
       [](ExperimentConfig& c, const std::string& v) { c.solver.scheme = parse_scheme(v); }},
      {"mollifier.kind",
       [](ExperimentConfig& c, const std::string& v) {
         Mollifier m = c.solver.mollifier.value_or(Mollifier{});
         m.kind = parse_mollifier_kind(v);
         c.solver.mollifier = m;
       }},
      {"mollifier.delta",
       [](ExperimentConfig& c, const std::string& v) {
         Mollifier m = c.solver.mollifier.value_or(Mollifier{});
         m.delta = to_double(v);
         m.validate();
         c.solver.mollifier = m;
       }},
      {"el.g",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.g = to_double(v);
         if (!(c.solver.g > 0.0 && c.solver.g < 1.0)) throw ConfigError("g must lie in (0, 1)");
       }},
      {"el.s0",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.s0 = to_double(v);
         if (!(c.solver.s0 > 0.0 && c.solver.s0 < 1.0)) {
           throw ConfigError("s0 must lie in (0, 1)");
         }
       }},
      {"el.evolve_logdet",
       [](ExperimentConfig& c, const std::string& v) { c.solver.evolve_logdet = to_bool(v); }},
      {"el.evolve_zeta",
       [](ExperimentConfig& c, const std::string& v) { c.solver.evolve_zeta = to_bool(v); }},
      {"ic.kind",
       [](ExperimentConfig& c, const std::string& v) { c.ic.kind = parse_initial_kind(v); }},
      {"ic.seed",
       [](ExperimentConfig& c, const std::string& v) {
         const auto s = to_integer(v);
         if (s < 0) throw ConfigError("seed must be >= 0");
         c.ic.seed = static_cast<std::uint64_t>(s);
       }},
      {"ic.amplitude",
       [](ExperimentConfig& c, const std::string& v) { c.ic.amplitude = to_double(v); }},
      {"ic.kmin", [](ExperimentConfig& c, const std::string& v) { c.ic.kmin = to_double(v); }},
      {"ic.kmax", [](ExperimentConfig& c, const std::string& v) { c.ic.kmax = to_double(v); }},
      {"ic.r0", [](ExperimentConfig& c, const std::string& v) { c.ic.r0 = to_double(v); }},
      {"ic.perturbation",
       [](ExperimentConfig& c, const std::string& v) {
         c.ic.perturbation = to_double(v);
         if (!(c.ic.perturbation >= 0.0)) throw ConfigError("perturbation must be >= 0");
       }},
      {"output.dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
      {"output.every",
       [](ExperimentConfig& c, const std::string& v) {
         const auto e = to_integer(v);
         if (e < 1) throw ConfigError("every must be >= 1");
         c.solver.output_every = static_cast<int>(e);
       }},
      {"output.snapshots",
       [](ExperimentConfig& c, const std::string& v) { c.snapshots = to_bool(v); }},
      {"diag.lambda",
       [](ExperimentConfig& c, const std::string& v) { c.solver.analytic_lambda = to_double(v); }},
      {"diag.p",
       [](ExperimentConfig& c, const std::string& v) {
         c.solver.analytic_p = static_cast<int>(to_integer(v));
       }},
      {"diag.horizon",
       [](ExperimentConfig& c, const std::string& v) { c.solver.horizon = to_double(v); }},
      {"compare.formulations",
       [](ExperimentConfig& c, const std::string& v) {
         c.compare_formulations = split_list(v);
         for (const auto& f : c.compare_formulations) parse_formulation(f);
       }},
      {"compare.deltas",
       [](ExperimentConfig& c, const std::string& v) {
         c.compare_deltas.clear();
         for (const auto& d : split_list(v)) c.compare_deltas.push_back(to_double(d));
       }},
      {"study.g",
       [](ExperimentConfig& c, const std::string& v) {
         c.study_g.clear();
         for (const auto& d : split_list(v)) c.study_g.push_back(to_double(d));
       }},
      {"study.ics",
       [](ExperimentConfig& c, const std::string& v) {
         c.study_ics = split_list(v);
         for (const auto& k : c.study_ics) parse_initial_kind(k);
       }},
  };
  return table;
}

std::string canonical_key(const std::string& key) {
  if (key == "ic") return "ic.kind";
  return key;
}

struct Entry {
  std::string key;
  std::string value;
  std::string where;
};

Entry split_entry(const std::string& line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
  Entry e{canonical_key(trim(line.substr(0, eq))), trim(line.substr(eq + 1)), where};
  if (e.key.empty()) throw ConfigError(where + ": empty key");
  if (e.value.empty()) throw ConfigError(where + ": key '" + e.key + "' has no value");
  return e;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    entries.push_back(split_entry(line, "line " + std::to_string(line_no)));
  }
  for (const auto& o : overrides) entries.push_back(split_entry(o, "--set " + o));

  ExperimentConfig config;
  std::map<std::string, std::string> seen;
  for (const auto& e : entries) {
    const auto it = setters().find(e.key);
    if (it == setters().end()) throw ConfigError(e.where + ": unknown key '" + e.key + "'");
    try {
      it->second(config, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(e.where + ": key '" + e.key + "': " + err.what());
    }
    seen[e.key] = e.where;
  }

  for (const char* key : {"grid.dim", "grid.n", "nu", "t_end", "formulation", "ic.kind"}) {
    if (!seen.count(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  }
  const bool needs_mollifier = config.solver.formulation == Formulation::mollified ||
                               config.solver.formulation == Formulation::vortex ||
                               config.solver.formulation == Formulation::cotangent;
  if (needs_mollifier && !seen.count("mollifier.delta")) {
    throw ConfigError("missing required key 'mollifier.delta' for formulation " +
                      to_string(config.solver.formulation));
  }
  if (config.ic.kind == InitialKind::abc && config.dim != 3) {
    throw ConfigError(seen["ic.kind"] + ": key 'ic.kind': abc requires grid.dim = 3");
  }
  if (config.solver.evolve_zeta && config.dim != 3) {
    throw ConfigError(seen["el.evolve_zeta"] + ": key 'el.evolve_zeta': requires grid.dim = 3");
  }
  const double kmask = config.n / 3.0 * std::sqrt(static_cast<double>(config.dim));
  if (config.ic.kmax > kmask) {
    throw ConfigError((seen.count("ic.kmax") ? seen["ic.kmax"] : std::string("defaults")) +
                      ": key 'ic.kmax': shell lies outside the dealias mask");
  }
  config.solver.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "grid.dim = " << c.dim << "\n";
  out << "grid.n = " << c.n << "\n";
  out << "nu = " << c.solver.nu << "\n";
  if (c.solver.dt) out << "dt = " << *c.solver.dt << "\n";
  out << "cfl = " << c.solver.cfl << "\n";
  out << "t_end = " << c.solver.t_end << "\n";
  out << "formulation = " << to_string(c.solver.formulation) << "\n";
  out << "scheme = " << to_string(c.solver.scheme) << "\n";
  if (c.solver.mollifier) {
    out << "mollifier.kind = " << to_string(c.solver.mollifier->kind) << "\n";
    out << "mollifier.delta = " << c.solver.mollifier->delta << "\n";
  }
  out << "el.g = " << c.solver.g << "\n";
  out << "el.s0 = " << c.solver.s0 << "\n";
  out << "el.evolve_logdet = " << (c.solver.evolve_logdet ? "true" : "false") << "\n";
  out << "el.evolve_zeta = " << (c.solver.evolve_zeta ? "true" : "false") << "\n";
  out << "ic.kind = " << to_string(c.ic.kind) << "\n";
  out << "ic.seed = " << c.ic.seed << "\n";
  out << "ic.amplitude = " << c.ic.amplitude << "\n";
  out << "ic.kmin = " << c.ic.kmin << "\n";
  out << "ic.kmax = " << c.ic.kmax << "\n";
  if (c.ic.r0) out << "ic.r0 = " << *c.ic.r0 << "\n";
  out << "ic.perturbation = " << c.ic.perturbation << "\n";
  out << "output.dir = " << c.output_dir << "\n";
  out << "output.every = " << c.solver.output_every << "\n";
  out << "output.snapshots = " << (c.snapshots ? "true" : "false") << "\n";
  out << "diag.lambda = " << c.solver.analytic_lambda << "\n";
  out << "diag.p = " << c.solver.analytic_p << "\n";
  if (c.solver.horizon) out << "diag.horizon = " << *c.solver.horizon << "\n";
  return out.str();
}

}  // namespace nitns
