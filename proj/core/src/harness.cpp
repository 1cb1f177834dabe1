#include "fiolab/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fiolab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Exploratory:
      return "exploratory";
  }
  return "fail";
}

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least squares needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(std::span<const double>(x)) / n;
  const double my = pairwise_sum(std::span<const double>(y)) / n;
  std::vector<double> sxx(x.size()), sxy(x.size()), syy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx[i] = dx * dx;
    sxy[i] = dx * dy;
    syy[i] = dy * dy;
  }
  const double Sxx = pairwise_sum(std::span<const double>(sxx));
  const double Sxy = pairwise_sum(std::span<const double>(sxy));
  const double Syy = pairwise_sum(std::span<const double>(syy));
  if (Sxx == 0.0) throw DomainError("least squares needs distinct abscissae");
  Fit f;
  f.slope = Sxy / Sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = Syy == 0.0 ? 1.0 : (Sxy * Sxy) / (Sxx * Syy);
  return f;
}

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string csv_cell(const nlohmann::json& x) {
  if (x.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << x.get<double>();
    return os.str();
  }
  if (x.is_string()) return x.get<std::string>();
  if (x.is_object()) {
    std::string s;
    for (auto it = x.begin(); it != x.end(); ++it) {
      if (!s.empty()) s += ";";
      s += it.key() + "=" + csv_cell(it.value());
    }
    return s;
  }
  return x.dump();
}

}  // namespace

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["params"] = params;
  auto arr = nlohmann::json::array();
  for (const auto& s : samples) arr.push_back(nlohmann::json::array({s.x, finite_or_null(s.y)}));
  j["samples"] = arr;
  if (fit)
    j["fit"] = {{"slope", finite_or_null(fit->slope)},
                {"intercept", finite_or_null(fit->intercept)},
                {"r2", finite_or_null(fit->r2)}};
  else
    j["fit"] = nullptr;
  j["verdict"] = to_string(verdict);
  j["diagnostics"] = diagnostics;
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "x,y\n";
  for (const auto& s : samples) {
    std::string cell = csv_cell(s.x);
    if (cell.find(',') != std::string::npos) cell = "\"" + cell + "\"";
    os << cell << ",";
    if (std::isfinite(s.y)) os << s.y;
    os << "\n";
  }
  return os.str();
}

void write_report(const ExperimentReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  const auto base = std::filesystem::path(dir) / r.experiment;
  {
    std::ofstream out(base.string() + ".json");
    if (!out) throw std::runtime_error("cannot write " + base.string() + ".json");
    out << r.to_json().dump(2) << "\n";
  }
  {
    std::ofstream out(base.string() + ".csv");
    if (!out) throw std::runtime_error("cannot write " + base.string() + ".csv");
    out << r.to_csv();
  }
}

int exit_code(const ExperimentReport& r) { return r.verdict == Verdict::Fail ? 1 : 0; }

ExperimentReport run_experiment(const RunConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "exp_kernel_decay_off_NQ") return exp_kernel_decay_off_NQ(cfg);
  if (e == "exp_kernel_lipschitz") return exp_kernel_lipschitz(cfg);
  if (e == "exp_h1_uniformity") return exp_h1_uniformity(cfg);
  if (e == "exp_large_atom_bound") return exp_large_atom_bound(cfg);
  if (e == "exp_threshold_sweep") return exp_threshold_sweep(cfg);
  if (e == "exp_offdiagonal_decay") return exp_offdiagonal_decay(cfg);
  if (e == "exp_schwartz_tail") return exp_schwartz_tail(cfg);
  if (e == "partition_exactness") return check_partition_exactness(cfg);
  if (e == "phase_certification") return check_phase_certification(cfg);
  if (e == "multiplier_oracle") return check_multiplier_oracle(cfg);
  if (e == "nq_inclusion") return check_nq_inclusion(cfg);
  if (e == "nq_measure") return check_nq_measure(cfg);
  if (e == "rescaling_uniformity") return check_rescaling_uniformity(cfg);
  if (e == "determinism") return check_determinism(cfg);
  throw ConfigError("key 'experiment': unknown experiment '" + e + "'");
}

}  // namespace fiolab
