#include <chrono>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "fiolab/config.hpp"
#include "fiolab/harness.hpp"

using namespace fiolab;

namespace {

struct Criterion {
  int id;
  const char* config;
  double limit_s;
  std::function<bool(const ExperimentReport&, std::string&)> judge;
};

bool by_verdict(const ExperimentReport& r, std::string& note) {
  note = r.summary;
  return r.verdict == Verdict::Pass;
}

// Growth slopes strictly increase with mu for p = 1 and stay <= 0.1 at mu_p for p = 2.
bool threshold_ordering(const ExperimentReport& r, std::string& note) {
  bool increasing = false, flat = false;
  bool seen1 = false, seen2 = false;
  for (const auto& [key, f] : r.diagnostics["flags"].items()) {
    const double mu_p = f["mu_p"].get<double>();
    if (key == "p=1") {
      seen1 = true;
      increasing = f["strictly_increasing_in_mu"].get<bool>();
    }
    if (key == "p=2") {
      seen2 = true;
      for (const auto& s : r.diagnostics["series"])
        if (s["p"].get<double>() == 2.0 && s["mu"].get<double>() == mu_p && s.contains("fit"))
          flat = s["fit"]["slope"].get<double>() <= 0.1;
    }
  }
  note = "p=1 increasing " + std::string(increasing ? "yes" : "no") + ", p=2 slope at mu_p <= 0.1 " +
         (flat ? "yes" : "no");
  return seen1 && seen2 && increasing && flat;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::string dir = FIOLAB_CONFIG_DIR;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0)
      strict = true;
    else if (std::strcmp(argv[i], "--config-dir") == 0 && i + 1 < argc)
      dir = argv[++i];
  }

  const std::vector<Criterion> criteria = {
      {1, "ac01_partition_exactness.cfg", 10, by_verdict},
      {2, "ac02_phase_certification.cfg", 30, by_verdict},
      {3, "ac03_multiplier_oracle.cfg", 120, by_verdict},
      {4, "ac04_nq_inclusion.cfg", 60, by_verdict},
      {5, "ac05_nq_measure.cfg", 120, by_verdict},
      {6, "ac06_kernel_decay_off_nq.cfg", 1200, by_verdict},
      {7, "ac07_kernel_lipschitz.cfg", 1200, by_verdict},
      {8, "ac08_h1_uniformity.cfg", 1800, by_verdict},
      {9, "ac09_large_atom_bound.cfg", 60, by_verdict},
      {10, "ac10_rescaling_uniformity.cfg", 300, by_verdict},
      {11, "ac11_schwartz_tail.cfg", 300, by_verdict},
      {12, "ac12_threshold_sweep.cfg", 1800, threshold_ordering},
      {13, "ac13_determinism.cfg", 2400, by_verdict},
  };

  int passed = 0, errors = 0;
  for (const auto& c : criteria) {
    const auto path = std::filesystem::path(dir) / c.config;
    std::string note;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const RunConfig cfg = parse_config(path.string());
      const ExperimentReport r = run_experiment(cfg);
      ok = c.judge(r, note);
    } catch (const std::exception& e) {
      note = std::string("error: ") + e.what();
      ++errors;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      ok = false;
      note += " (runtime over limit)";
    }
    if (ok) ++passed;
    std::cout << "AC" << c.id << " " << (ok ? "PASS" : "FAIL") << " " << c.config << ": "
              << note << " [" << static_cast<int>(secs) << " s / " << c.limit_s << " s]"
              << std::endl;
  }
  std::cout << passed << "/" << criteria.size() << " criteria pass" << std::endl;
  if (errors > 0) return 2;
  if (strict && passed != static_cast<int>(criteria.size())) return 1;
  return 0;
}
