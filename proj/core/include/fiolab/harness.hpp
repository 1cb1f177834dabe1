#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiolab/config.hpp"

namespace fiolab {

enum class Verdict { Pass, Fail, Exploratory };
std::string to_string(Verdict v);

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = slope * x + intercept; needs >= 2 distinct x.
Fit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct Sample {
  nlohmann::json x;  // number or object of labelled coordinates
  double y = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::json params;
  std::vector<Sample> samples;
  std::optional<Fit> fit;
  Verdict verdict = Verdict::Fail;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::string summary;  // one-line console summary, not serialized

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Writes <dir>/<experiment>.json and <dir>/<experiment>.csv.
void write_report(const ExperimentReport& r, const std::string& dir);

// Dispatches experiments and acceptance checks by name. Throws ConfigError
// or QuadratureRefusal on invalid setups.
ExperimentReport run_experiment(const RunConfig& cfg);

int exit_code(const ExperimentReport& r);

ExperimentReport exp_kernel_decay_off_NQ(const RunConfig& cfg);
ExperimentReport exp_kernel_lipschitz(const RunConfig& cfg);
ExperimentReport exp_h1_uniformity(const RunConfig& cfg);
ExperimentReport exp_large_atom_bound(const RunConfig& cfg);
ExperimentReport exp_threshold_sweep(const RunConfig& cfg);
ExperimentReport exp_offdiagonal_decay(const RunConfig& cfg);
ExperimentReport exp_schwartz_tail(const RunConfig& cfg);

ExperimentReport check_partition_exactness(const RunConfig& cfg);
ExperimentReport check_phase_certification(const RunConfig& cfg);
ExperimentReport check_multiplier_oracle(const RunConfig& cfg);
ExperimentReport check_nq_inclusion(const RunConfig& cfg);
ExperimentReport check_nq_measure(const RunConfig& cfg);
ExperimentReport check_rescaling_uniformity(const RunConfig& cfg);
ExperimentReport check_determinism(const RunConfig& cfg);

}  // namespace fiolab
