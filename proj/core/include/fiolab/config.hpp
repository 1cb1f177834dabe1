#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiolab/amplitude.hpp"
#include "fiolab/phase.hpp"

namespace fiolab {

struct RunConfig {
  std::string experiment;
  std::string phase = "shifted_wave";
  std::string amplitude = "sg_power";
  Flavor flavor = Flavor::I;
  int n = 2;
  Orders orders;

  double extent = 12.0;
  int points = 128;
  long long max_points = 1LL << 24;  // per-field ceiling for lattice grids

  int k_min = 1;
  int k_max = 8;
  int radial_points = 0;
  int angular_points = 0;
  double oversample = 1.5;

  double c0 = 0.5;
  int j = 2;
  double m_override = 0.0;  // 0 selects the measured constant
  double wave_k = 0.25;
  std::string atom = "tensor_haar_smoothed";
  std::vector<double> q_list = {1.0};
  std::vector<double> y0_list = {0.0};
  int samples = 1000;

  int sweep_k_min = 1;
  int sweep_k_max = 6;
  int sweep_j_min = 2;
  int sweep_j_max = 6;

  std::vector<double> p_list = {1.0};
  std::vector<double> mu_offsets = {-0.5, 0.0, 0.5, 1.0};

  double ray_t_min = 4.0;
  double ray_t_max = 64.0;
  int ray_samples = 9;
  int ray_count = 2;

  std::string target_config;           // determinism: config to repeat
  std::vector<int> worker_list = {1, 4};

  std::uint64_t seed = 0;
  int workers = 0;  // 0 selects the available parallelism
  std::string output_dir = "out";
  std::string source_path;

  // Effective values, excluding workers and output_dir.
  nlohmann::json echo() const;
  int effective_workers() const;
};

// Line-oriented `key = value` parser; '#' starts a comment.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Names accepted by the `experiment` key: the seven experiments followed by
// the acceptance checks.
const std::vector<std::string>& experiment_names();
const std::vector<std::string>& check_names();
bool is_known_experiment(const std::string& name);

// Documented keys with their defaults, for help output.
std::vector<std::string> config_keys();

}  // namespace fiolab
