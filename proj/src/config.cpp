#include "fplap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fplap/errors.hpp"

namespace fplap {

namespace {

struct KeyValue {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, KeyValue>;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class ConfigReader {
public:
  ConfigReader(const std::string& text, std::string origin)
      : origin_(std::move(origin)) {
    std::istringstream in(text);
    std::string line;
    std::string section = "";
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          fail(lineno, "malformed section header '" + t + "'");
        section = trim(t.substr(1, t.size() - 2));
        sections_[section];
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        fail(lineno, "expected 'key = value', got '" + t + "'");
      if (section.empty())
        fail(lineno, "key outside any [section]");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty() || value.empty())
        fail(lineno, "empty key or value in '" + t + "'");
      auto [it, fresh] = sections_[section].emplace(key, KeyValue{value, lineno});
      if (!fresh)
        fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ParseError(origin_ + ": line " + std::to_string(line) + ": " + msg);
  }

  bool has(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return false;
    return s->second.count(key) > 0;
  }

  std::string get(const std::string& section, const std::string& key,
                  bool& present) {
    auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key)) {
      present = false;
      return "";
    }
    present = true;
    auto& kv = s->second.at(key);
    kv.used = true;
    return kv.value;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) {
    bool present = false;
    const std::string v = get(section, key, present);
    if (!present) return fallback;
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      fail(line_of(section, key), "cannot parse '" + v + "' as a number for " +
                                      section + "." + key);
    }
  }

  long get_int(const std::string& section, const std::string& key,
               long fallback) {
    bool present = false;
    const std::string v = get(section, key, present);
    if (!present) return fallback;
    try {
      std::size_t pos = 0;
      const long x = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      fail(line_of(section, key), "cannot parse '" + v + "' as an integer for " +
                                      section + "." + key);
    }
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) {
    bool present = false;
    const std::string v = get(section, key, present);
    if (!present) return fallback;
    if (v == "true") return true;
    if (v == "false") return false;
    fail(line_of(section, key),
         "cannot parse '" + v + "' as a boolean (true|false) for " + section +
             "." + key);
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) {
    bool present = false;
    const std::string v = get(section, key, present);
    return present ? v : fallback;
  }

  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) {
    bool present = false;
    const std::string v = get(section, key, present);
    std::vector<std::string> items;
    if (!present) return items;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) items.push_back(t);
    }
    return items;
  }

  int line_of(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return 0;
    auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
  }

  /// Unknown sections or keys are errors: a typo must not silently fall back
  /// to a default.
  void check_known(const std::map<std::string, std::set<std::string>>& schema) {
    for (const auto& [sec, kvs] : sections_) {
      const auto it = schema.find(sec);
      if (it == schema.end())
        throw ParseError(origin_ + ": unknown section [" + sec + "]");
      for (const auto& [key, kv] : kvs) {
        if (!it->second.count(key))
          throw ParseError(origin_ + ": line " + std::to_string(kv.line) +
                           ": unknown key '" + key + "' in [" + sec + "]");
      }
    }
  }

private:
  std::string origin_;
  std::map<std::string, Section> sections_;
};

const std::map<std::string, std::set<std::string>> kSchema = {
    {"manifold", {"kind", "level", "side", "path"}},
    {"domain", {"kind", "center", "radius", "indices"}},
    {"operator", {"s", "p", "floor_scale"}},
    {"nonlinearity",
     {"form", "lambda", "c", "r", "q", "beta", "q_growth", "mu_ar",
      "positive_part", "table_path"}},
    {"solver",
     {"tol", "max_iters", "armijo_c1", "backtrack", "step0", "path_nodes",
      "step_cap", "nontrivial_norm", "redistribute_every", "geometry_samples",
      "kernel_backend", "allow_trivial", "regime"}},
    {"run", {"seed", "out"}},
    {"verify", {"checks", "trials", "q_target", "lipschitz_g"}},
    {"study", {"kind", "resolutions", "starts"}},
};

Nonlinearity parse_nonlinearity(ConfigReader& reader) {
  const std::string form = reader.get_string("nonlinearity", "form", "zero");
  Nonlinearity nl;
  const bool has_lambda = reader.has("nonlinearity", "lambda");
  const bool has_c = reader.has("nonlinearity", "c");
  if (has_lambda && has_c)
    throw ParseError("nonlinearity amplitude given twice (both lambda and c)");
  const double amplitude = has_c ? reader.get_double("nonlinearity", "c", 1.0)
                                 : reader.get_double("nonlinearity", "lambda", 1.0);
  const bool has_r = reader.has("nonlinearity", "r");
  const bool has_q = reader.has("nonlinearity", "q");
  if (has_r && has_q)
    throw ParseError("nonlinearity exponent given twice (both r and q)");
  const double r = has_q ? reader.get_double("nonlinearity", "q", 2.0)
                         : reader.get_double("nonlinearity", "r", 2.0);

  if (form == "zero") {
    nl = Nonlinearity::zero_reaction();
  } else if (form == "power") {
    nl = Nonlinearity::power(amplitude, r);
  } else if (form == "exp_damped_power") {
    nl = Nonlinearity::exp_damped_power(amplitude, r);
  } else if (form == "table") {
    const std::string path = reader.get_string("nonlinearity", "table_path", "");
    if (path.empty())
      throw ParseError("nonlinearity form=table needs table_path");
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open nonlinearity table");
    std::vector<double> ts, fs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string t = trim(line);
      if (t.empty()) continue;
      std::replace(t.begin(), t.end(), ',', ' ');
      std::istringstream fields(t);
      double tv, fv;
      if (!(fields >> tv >> fv))
        throw ParseError(path + ": line " + std::to_string(lineno) +
                         ": expected 't,f' pair");
      ts.push_back(tv);
      fs.push_back(fv);
    }
    nl = Nonlinearity::from_table(std::move(ts), std::move(fs));
  } else {
    throw ParseError("unknown nonlinearity form '" + form +
                     "' (expected zero|power|exp_damped_power|table)");
  }

  nl.beta = reader.get_double("nonlinearity", "beta", nl.beta);
  nl.q_growth = reader.get_double("nonlinearity", "q_growth", nl.q_growth);
  if (reader.has("nonlinearity", "mu_ar"))
    nl.mu_ar = reader.get_double("nonlinearity", "mu_ar", 0.0);
  nl.positive_part = reader.get_bool("nonlinearity", "positive_part", false);
  if (!(nl.beta > 0.0)) throw ParseError("nonlinearity beta must be positive");
  if (!(nl.q_growth > 1.0)) throw ParseError("nonlinearity q_growth must be > 1");
  return nl;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  ConfigReader reader(text, origin);

  RunConfig cfg;
  cfg.raw_text = text;

  cfg.manifold.kind = reader.get_string("manifold", "kind", "torus");
  cfg.manifold.level = static_cast<int>(reader.get_int("manifold", "level", 2));
  cfg.manifold.side = static_cast<int>(reader.get_int("manifold", "side", 8));
  cfg.manifold.path = reader.get_string("manifold", "path", "");
  if (cfg.manifold.kind != "torus" && cfg.manifold.kind != "sphere" &&
      cfg.manifold.kind != "file")
    throw ParseError(origin + ": manifold.kind must be torus|sphere|file");
  if (cfg.manifold.kind == "file" && cfg.manifold.path.empty())
    throw ParseError(origin + ": manifold.kind=file needs manifold.path");

  cfg.domain.kind = reader.get_string("domain", "kind", "cap");
  cfg.domain.cap.center = static_cast<int>(reader.get_int("domain", "center", 0));
  cfg.domain.cap.radius = reader.get_double("domain", "radius", 0.3);
  for (const std::string& s : reader.get_list("domain", "indices"))
    cfg.domain.indices.push_back(std::stoi(s));
  if (cfg.domain.kind != "cap" && cfg.domain.kind != "indices")
    throw ParseError(origin + ": domain.kind must be cap|indices");
  if (cfg.domain.kind == "indices" && cfg.domain.indices.empty())
    throw ParseError(origin + ": domain.kind=indices needs a nonempty list");

  cfg.s = reader.get_double("operator", "s", 0.5);
  cfg.p = reader.get_double("operator", "p", 2.0);
  cfg.policy.floor_scale = reader.get_double("operator", "floor_scale", 0.5);
  if (!(cfg.s > 0.0 && cfg.s < 1.0))
    throw ParseError(origin + ": operator.s violates the constraint s in (0,1)");
  if (!(cfg.p > 1.0))
    throw ParseError(origin + ": operator.p violates the constraint p > 1");
  // All supported meshes are surfaces (N = 2), so N > ps is checkable now.
  if (!(2.0 > cfg.p * cfg.s))
    throw ParseError(origin +
                     ": operator violates N > p*s (N=2 for supported meshes, "
                     "p*s=" + std::to_string(cfg.p * cfg.s) + ")");
  if (!(cfg.policy.floor_scale > 0.0))
    throw ParseError(origin + ": operator.floor_scale must be positive");

  cfg.nl = parse_nonlinearity(reader);

  cfg.solver.tol = reader.get_double("solver", "tol", cfg.solver.tol);
  cfg.solver.max_iters =
      static_cast<int>(reader.get_int("solver", "max_iters", cfg.solver.max_iters));
  cfg.solver.armijo_c1 =
      reader.get_double("solver", "armijo_c1", cfg.solver.armijo_c1);
  cfg.solver.backtrack =
      reader.get_double("solver", "backtrack", cfg.solver.backtrack);
  cfg.solver.step0 = reader.get_double("solver", "step0", cfg.solver.step0);
  cfg.solver.path_nodes =
      static_cast<int>(reader.get_int("solver", "path_nodes", cfg.solver.path_nodes));
  cfg.solver.step_cap = reader.get_double("solver", "step_cap", cfg.solver.step_cap);
  cfg.solver.nontrivial_norm =
      reader.get_double("solver", "nontrivial_norm", cfg.solver.nontrivial_norm);
  cfg.solver.redistribute_every = static_cast<int>(
      reader.get_int("solver", "redistribute_every", cfg.solver.redistribute_every));
  cfg.solver.geometry_samples = static_cast<int>(
      reader.get_int("solver", "geometry_samples", cfg.solver.geometry_samples));
  cfg.backend = kern::parse_backend_mode(
      reader.get_string("solver", "kernel_backend", "auto"));
  cfg.allow_trivial = reader.get_bool("solver", "allow_trivial", false);
  cfg.regime = reader.get_string("solver", "regime", "auto");
  if (cfg.regime != "auto" && cfg.regime != "direct" &&
      cfg.regime != "mountain_pass")
    throw ParseError(origin + ": solver.regime must be auto|direct|mountain_pass");
  cfg.solver.validate();

  cfg.seed = static_cast<std::uint64_t>(reader.get_int("run", "seed", 0));
  cfg.solver.seed = cfg.seed;
  cfg.out_dir = reader.get_string("run", "out", "out");

  cfg.verify.checks = reader.get_list("verify", "checks");
  cfg.verify.trials =
      static_cast<int>(reader.get_int("verify", "trials", cfg.verify.trials));
  cfg.verify.q_target = reader.get_double("verify", "q_target", 0.0);
  cfg.verify.lipschitz_g =
      reader.get_string("verify", "lipschitz_g", cfg.verify.lipschitz_g);

  cfg.study.kind = reader.get_string("study", "kind", "ladder");
  for (const std::string& s : reader.get_list("study", "resolutions"))
    cfg.study.resolutions.push_back(std::stoi(s));
  cfg.study.starts = static_cast<int>(reader.get_int("study", "starts", 5));
  if (cfg.study.kind != "ladder" && cfg.study.kind != "uniqueness")
    throw ParseError(origin + ": study.kind must be ladder|uniqueness");

  reader.check_known(kSchema);

  // Regime coherence: auto-dispatch mirrors the theorem hypotheses. An
  // explicit regime override skips the range check (experimentation knob).
  if (cfg.regime == "auto" && cfg.nl.form != Nonlinearity::Form::zero) {
    const double pstar = critical_exponent(2, cfg.s, cfg.p);
    const double q = cfg.nl.q_growth;
    if (!(q < cfg.p) && !(q > cfg.p && q < pstar))
      throw ParseError(
          origin + ": declared q_growth=" + std::to_string(q) +
          " fits neither regime: need q < p (direct) or p < q < p*_s=" +
          std::to_string(pstar) + " (mountain pass); set solver.regime to "
          "override");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

ManifoldMesh RunConfig::build_mesh() const {
  if (manifold.kind == "sphere") return build_sphere(manifold.level);
  if (manifold.kind == "torus") return build_flat_torus(manifold.side);
  return load_mesh(manifold.path);
}

DirichletDomain RunConfig::build_domain(const ManifoldMesh& mesh) const {
  if (domain.kind == "cap") return select_domain(mesh, domain.cap);
  return select_domain(mesh, domain.indices);
}

std::string RunConfig::resolved_regime() const {
  if (regime != "auto") return regime;
  if (nl.form == Nonlinearity::Form::zero) return "direct";
  return nl.q_growth < p ? "direct" : "mountain_pass";
}

}
