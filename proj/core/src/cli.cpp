#include "fiolab/cli.hpp"

#include <ostream>

#include "fiolab/amplitude.hpp"
#include "fiolab/config.hpp"
#include "fiolab/harness.hpp"
#include "fiolab/phase.hpp"

namespace fiolab {

int cli_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            std::optional<int> workers, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(config_path);
    if (out_dir) cfg.output_dir = *out_dir;
    if (workers) {
      if (*workers < 1) throw ConfigError("--workers must be positive");
      cfg.workers = *workers;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  ExperimentReport rep;
  try {
    rep = run_experiment(cfg);
  } catch (const QuadratureRefusal& e) {
    err << "quadrature refusal: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return 2;
  }
  try {
    write_report(rep, cfg.output_dir);
  } catch (const std::exception& e) {
    err << "i/o error: " << e.what() << "\n";
    return 2;
  }
  out << rep.experiment << ": " << rep.summary << " -> " << to_string(rep.verdict) << "\n";
  return exit_code(rep);
}

int cli_list(bool all, std::ostream& out) {
  for (const auto& e : experiment_names()) out << e << "\n";
  if (all)
    for (const auto& c : check_names()) out << c << "\n";
  return 0;
}

int cli_certify(const std::string& phase_id, const std::string& flavor, int n, std::ostream& out,
                std::ostream& err) {
  PhaseFunction phi;
  Flavor fl;
  try {
    phi = make_builtin_phase(phase_id, n);
    fl = parse_flavor(flavor);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  const PhaseSampleSpec ps;
  const PhaseCertificate pc = certify_phase(phi, fl, ps);
  out << "phase " << phase_id << " flavor " << to_string(fl) << "\n";
  out << "  samples: " << ps.describe() << "\n";
  out << "  nondegeneracy_min: " << pc.nondegeneracy_min << "\n";
  out << "  euler_max: " << pc.euler_max << "\n";
  out << "  equivalence ratios: [" << pc.equivalence_ratios[0] << ", " << pc.equivalence_ratios[1]
      << "] [" << pc.equivalence_ratios[2] << ", " << pc.equivalence_ratios[3] << "]\n";
  double worst = 0.0;
  for (const auto& [k, v] : pc.bound_constants) worst = std::max(worst, v);
  out << "  largest bound constant: " << worst << " (ceiling " << pc.ceiling << ")\n";
  out << "  phase: " << (pc.pass ? "pass" : "fail") << "\n";
  bool ok = pc.pass;
  const SymbolSampleSpec ss;
  for (const std::string id : {"sg_power", "sg_power_osc"}) {
    const Amplitude b = make_builtin_amplitude(id, n, Orders{-0.5, 0.0, -0.5}, fl);
    const SymbolCertificate sc = certify_symbol(b, ss, 3);
    double sw = 0.0;
    for (const auto& [k, v] : sc.constants) sw = std::max(sw, v);
    out << "  symbol " << id << " (m1=-0.5, m2=0, mu=-0.5): largest constant " << sw << " -> "
        << (sc.pass ? "pass" : "fail") << "\n";
    ok = ok && sc.pass;
  }
  out << (ok ? "certified" : "not certified") << "\n";
  return ok ? 0 : 1;
}

}  // namespace fiolab
