#include "fiolab/config.hpp"

#include "fiolab/decomp.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fiolab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  const auto slash = v.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string a = trim(v.substr(0, slash)), b = trim(v.substr(slash + 1));
      std::size_t ua = 0, ub = 0;
      const double num = std::stod(a, &ua);
      const double den = std::stod(b, &ub);
      if (ua != a.size() || ub != b.size() || den == 0.0) throw std::invalid_argument(v);
      return num / den;
    }
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a real number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(key, trim(item))));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& v)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment", [](RunConfig& c, const auto&, const auto& v) { c.experiment = v; }},
      {"phase", [](RunConfig& c, const auto&, const auto& v) { c.phase = v; }},
      {"amplitude", [](RunConfig& c, const auto&, const auto& v) { c.amplitude = v; }},
      {"flavor", [](RunConfig& c, const auto&, const auto& v) { c.flavor = parse_flavor(v); }},
      {"n", [](RunConfig& c, const auto& k, const auto& v) { c.n = static_cast<int>(parse_int(k, v)); }},
      {"orders.m", [](RunConfig& c, const auto& k, const auto& v) {
         c.orders.m1 = parse_real(k, v);
         c.orders.m2 = 0.0;
       }},
      {"orders.m1", [](RunConfig& c, const auto& k, const auto& v) { c.orders.m1 = parse_real(k, v); }},
      {"orders.m2", [](RunConfig& c, const auto& k, const auto& v) { c.orders.m2 = parse_real(k, v); }},
      {"orders.mu", [](RunConfig& c, const auto& k, const auto& v) { c.orders.mu = parse_real(k, v); }},
      {"grid.extent", [](RunConfig& c, const auto& k, const auto& v) { c.extent = parse_real(k, v); }},
      {"grid.points", [](RunConfig& c, const auto& k, const auto& v) {
         c.points = static_cast<int>(parse_int(k, v));
       }},
      {"grid.max_points", [](RunConfig& c, const auto& k, const auto& v) { c.max_points = parse_int(k, v); }},
      {"quad.k_min", [](RunConfig& c, const auto& k, const auto& v) {
         c.k_min = static_cast<int>(parse_int(k, v));
       }},
      {"quad.k_max", [](RunConfig& c, const auto& k, const auto& v) {
         c.k_max = static_cast<int>(parse_int(k, v));
       }},
      {"quad.radial_points", [](RunConfig& c, const auto& k, const auto& v) {
         c.radial_points = static_cast<int>(parse_int(k, v));
       }},
      {"quad.angular_points", [](RunConfig& c, const auto& k, const auto& v) {
         c.angular_points = static_cast<int>(parse_int(k, v));
       }},
      {"quad.oversample", [](RunConfig& c, const auto& k, const auto& v) { c.oversample = parse_real(k, v); }},
      {"decomp.c0", [](RunConfig& c, const auto& k, const auto& v) { c.c0 = parse_real(k, v); }},
      {"decomp.j", [](RunConfig& c, const auto& k, const auto& v) { c.j = static_cast<int>(parse_int(k, v)); }},
      {"decomp.M", [](RunConfig& c, const auto& k, const auto& v) { c.m_override = parse_real(k, v); }},
      {"decomp.wave_k", [](RunConfig& c, const auto& k, const auto& v) { c.wave_k = parse_real(k, v); }},
      {"decomp.atom", [](RunConfig& c, const auto&, const auto& v) { c.atom = v; }},
      {"decomp.q", [](RunConfig& c, const auto& k, const auto& v) { c.q_list = parse_real_list(k, v); }},
      {"decomp.y0", [](RunConfig& c, const auto& k, const auto& v) { c.y0_list = parse_real_list(k, v); }},
      {"decomp.samples", [](RunConfig& c, const auto& k, const auto& v) {
         c.samples = static_cast<int>(parse_int(k, v));
       }},
      {"sweep.k_min", [](RunConfig& c, const auto& k, const auto& v) {
         c.sweep_k_min = static_cast<int>(parse_int(k, v));
       }},
      {"sweep.k_max", [](RunConfig& c, const auto& k, const auto& v) {
         c.sweep_k_max = static_cast<int>(parse_int(k, v));
       }},
      {"sweep.j_min", [](RunConfig& c, const auto& k, const auto& v) {
         c.sweep_j_min = static_cast<int>(parse_int(k, v));
       }},
      {"sweep.j_max", [](RunConfig& c, const auto& k, const auto& v) {
         c.sweep_j_max = static_cast<int>(parse_int(k, v));
       }},
      {"thresholds.p", [](RunConfig& c, const auto& k, const auto& v) { c.p_list = parse_real_list(k, v); }},
      {"thresholds.mu_offsets", [](RunConfig& c, const auto& k, const auto& v) {
         c.mu_offsets = parse_real_list(k, v);
       }},
      {"ray.t_min", [](RunConfig& c, const auto& k, const auto& v) { c.ray_t_min = parse_real(k, v); }},
      {"ray.t_max", [](RunConfig& c, const auto& k, const auto& v) { c.ray_t_max = parse_real(k, v); }},
      {"ray.samples", [](RunConfig& c, const auto& k, const auto& v) {
         c.ray_samples = static_cast<int>(parse_int(k, v));
       }},
      {"ray.count", [](RunConfig& c, const auto& k, const auto& v) {
         c.ray_count = static_cast<int>(parse_int(k, v));
       }},
      {"determinism.config", [](RunConfig& c, const auto&, const auto& v) { c.target_config = v; }},
      {"determinism.workers", [](RunConfig& c, const auto& k, const auto& v) {
         c.worker_list = parse_int_list(k, v);
       }},
      {"seed", [](RunConfig& c, const auto& k, const auto& v) {
         const long long s = parse_int(k, v);
         if (s < 0) throw ConfigError("key 'seed': must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"workers", [](RunConfig& c, const auto& k, const auto& v) {
         c.workers = static_cast<int>(parse_int(k, v));
       }},
      {"output_dir", [](RunConfig& c, const auto&, const auto& v) { c.output_dir = v; }},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("key '" + key + "': " + what);
}

void validate(RunConfig& c) {
  require(!c.experiment.empty(), "experiment", "missing");
  require(is_known_experiment(c.experiment), "experiment",
          "unknown experiment '" + c.experiment + "'");
  require(c.n >= 1 && c.n <= kMaxDim, "n", "must be 1, 2 or 3");
  const auto pids = builtin_phase_ids();
  require(std::find(pids.begin(), pids.end(), c.phase) != pids.end(), "phase",
          "unknown phase '" + c.phase + "'");
  const auto aids = builtin_amplitude_ids();
  require(std::find(aids.begin(), aids.end(), c.amplitude) != aids.end(), "amplitude",
          "unknown amplitude '" + c.amplitude + "'");
  require(c.extent > 0.0, "grid.extent", "must be positive");
  require(c.points >= 2, "grid.points", "must be at least 2");
  require(c.max_points >= 4, "grid.max_points", "must be at least 4");
  require(c.k_min >= 1, "quad.k_min", "must be at least 1");
  require(c.k_max >= c.k_min, "quad.k_max", "must be >= quad.k_min");
  require(c.k_max <= 20, "quad.k_max", "must be <= 20");
  require(c.radial_points >= 0, "quad.radial_points", "must be non-negative");
  require(c.angular_points >= 0, "quad.angular_points", "must be non-negative");
  require(c.c0 > 0.0 && c.c0 < 1.0, "decomp.c0", "must lie in (0, 1)");
  require(c.j >= 0 && c.j <= 30, "decomp.j", "must lie in 0..30");
  require(c.m_override >= 0.0, "decomp.M", "must be non-negative");
  require(c.wave_k > 0.0 && c.wave_k < 1.0, "decomp.wave_k", "must lie in (0, 1)");
  try {
    (void)parse_atom_profile(c.atom);
  } catch (const std::exception& e) {
    throw ConfigError("key 'decomp.atom': " + std::string(e.what()));
  }
  for (double q : c.q_list) require(q > 0.0, "decomp.q", "entries must be positive");
  for (double y : c.y0_list) require(y >= 0.0, "decomp.y0", "entries must be non-negative");
  require(c.samples >= 1, "decomp.samples", "must be positive");
  require(c.sweep_k_min >= 1 && c.sweep_k_max >= c.sweep_k_min, "sweep.k_max",
          "needs 1 <= sweep.k_min <= sweep.k_max");
  require(c.sweep_j_min >= 0 && c.sweep_j_max >= c.sweep_j_min, "sweep.j_max",
          "needs 0 <= sweep.j_min <= sweep.j_max");
  for (double p : c.p_list) require(p >= 1.0, "thresholds.p", "entries must be >= 1");
  require(c.ray_t_min > 0.0 && c.ray_t_max > c.ray_t_min, "ray.t_max",
          "needs 0 < ray.t_min < ray.t_max");
  require(c.ray_samples >= 2, "ray.samples", "must be at least 2");
  require(c.ray_count >= 1, "ray.count", "must be positive");
  for (int w : c.worker_list) require(w >= 1, "determinism.workers", "entries must be positive");
  require(c.workers >= 0, "workers", "must be non-negative");
  if (c.experiment == "determinism")
    require(!c.target_config.empty(), "determinism.config", "required for determinism runs");
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "exp_kernel_decay_off_NQ", "exp_kernel_lipschitz",   "exp_h1_uniformity",
      "exp_large_atom_bound",    "exp_threshold_sweep",    "exp_offdiagonal_decay",
      "exp_schwartz_tail"};
  return names;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "partition_exactness", "phase_certification", "multiplier_oracle", "nq_inclusion",
      "nq_measure",          "rescaling_uniformity", "determinism"};
  return names;
}

bool is_known_experiment(const std::string& name) {
  const auto& e = experiment_names();
  const auto& c = check_names();
  return std::find(e.begin(), e.end(), name) != e.end() ||
         std::find(c.begin(), c.end(), name) != c.end();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig c;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool m_joint = false;
  bool m_split = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": missing key");
    if (value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                        "' has no value");
    const auto it = setters().find(key);
    if (it == setters().end())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (const auto prev = seen.find(key); prev != seen.end())
      throw ConfigError(origin + ": duplicate key '" + key + "' on lines " +
                        std::to_string(prev->second) + " and " + std::to_string(lineno));
    seen[key] = lineno;
    if (key == "orders.m") m_joint = true;
    if (key == "orders.m1" || key == "orders.m2") m_split = true;
    if (m_joint && m_split)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key '" + key + "': orders.m conflicts with orders.m1/orders.m2");
    try {
      it->second(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                        "': " + e.what());
    }
  }
  c.source_path = origin;
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config_text(ss.str(), path);
  if (!c.target_config.empty() && std::filesystem::path(c.target_config).is_relative())
    c.target_config =
        (std::filesystem::path(path).parent_path() / c.target_config).lexically_normal().string();
  return c;
}

int RunConfig::effective_workers() const { return workers > 0 ? workers : default_workers(); }

nlohmann::json RunConfig::echo() const {
  nlohmann::json out;
  out["experiment"] = experiment;
  out["phase"] = phase;
  out["amplitude"] = amplitude;
  out["flavor"] = to_string(flavor);
  out["n"] = n;
  out["orders"] = {{"m1", orders.m1}, {"m2", orders.m2}, {"mu", orders.mu}};
  out["grid"] = {{"extent", extent}, {"points", points}, {"max_points", max_points}};
  out["quad"] = {{"k_min", k_min},
               {"k_max", k_max},
               {"radial_points", radial_points},
               {"angular_points", angular_points},
               {"oversample", oversample}};
  out["decomp"] = {{"c0", c0},     {"j", j},           {"M", m_override},
                 {"wave_k", wave_k}, {"atom", atom},     {"q", q_list},
                 {"y0", y0_list}, {"samples", samples}};
  out["sweep"] = {{"k_min", sweep_k_min},
                {"k_max", sweep_k_max},
                {"j_min", sweep_j_min},
                {"j_max", sweep_j_max}};
  out["thresholds"] = {{"p", p_list}, {"mu_offsets", mu_offsets}};
  out["ray"] = {{"t_min", ray_t_min},
              {"t_max", ray_t_max},
              {"samples", ray_samples},
              {"count", ray_count}};
  if (experiment == "determinism")
    out["determinism"] = {{"config", std::filesystem::path(target_config).filename().string()},
                        {"workers", worker_list}};
  out["seed"] = seed;
  return out;
}

}  // namespace fiolab
