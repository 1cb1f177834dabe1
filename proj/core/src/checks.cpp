#include <algorithm>
#include <map>
#include <sstream>

#include "fiolab/decomp.hpp"
#include "fiolab/oracles.hpp"
#include "harness_util.hpp"

namespace fiolab {

using namespace detail;

ExperimentReport check_partition_exactness(const RunConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const int n = cfg.n;
  double radial_max = 0.0, angular_max = 0.0;
  for (int k = cfg.sweep_k_min; k <= cfg.sweep_k_max; ++k) {
    double rad = 0.0;
    const int dense = 4001;
    for (int i = 0; i < dense; ++i) {
      const double r = std::ldexp(std::pow(16.0, static_cast<double>(i) / (dense - 1)), k - 2);
      std::vector<double> parts;
      for (int m = k - 5; m <= k + 5; ++m) parts.push_back(RadialCutoffs::theta(std::ldexp(r, -m)));
      rad = std::max(rad, std::abs(pairwise_sum(std::span<const double>(parts)) - 1.0));
    }
    radial_max = std::max(radial_max, rad);
    rep.samples.push_back({nlohmann::json{{"part", "radial"}, {"k", k}}, rad});
    for (double yr : cfg.y0_list) {
      const AngularFrame fr = make_angular_frame(n, k, along_e1(yr, n), cfg.c0);
      double ang = 0.0;
      const auto dirs = sample_directions(n, n == 2 ? 8192 : 4096);
      std::vector<std::pair<int, double>> cs;
      for (const auto& w : dirs) {
        fr.cutoffs(scaled(w, std::ldexp(1.0, k), n), cs);
        std::vector<double> parts;
        for (const auto& [nu, v] : cs) parts.push_back(v);
        ang = std::max(ang, std::abs(pairwise_sum(std::span<const double>(parts)) - 1.0));
      }
      angular_max = std::max(angular_max, ang);
      rep.samples.push_back({nlohmann::json{{"part", "angular"}, {"k", k}, {"y0", yr}}, ang});
    }
  }
  rep.diagnostics["radial_max_error"] = radial_max;
  rep.diagnostics["angular_max_error"] = angular_max;
  rep.diagnostics["tolerances"] = {{"radial", 1e-10}, {"angular", 1e-8}};
  rep.verdict = (radial_max <= 1e-10 && angular_max <= 1e-8) ? Verdict::Pass : Verdict::Fail;
  rep.summary = "radial " + fmt(radial_max) + " angular " + fmt(angular_max);
  return rep;
}

ExperimentReport check_phase_certification(const RunConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  bool ok = true;
  nlohmann::json certs = nlohmann::json::object();
  for (const auto& id : builtin_phase_ids()) {
    const PhaseFunction phi = make_builtin_phase(id, cfg.n);
    const PhaseCertificate c = certify_phase(phi, cfg.flavor, PhaseSampleSpec{});
    const bool pass = c.pass && c.nondegeneracy_min >= 0.5 && c.euler_max <= 1e-10;
    ok = ok && pass;
    certs[id] = {{"nondegeneracy_min", c.nondegeneracy_min},
                 {"euler_max", c.euler_max},
                 {"equivalence_ratios", c.equivalence_ratios},
                 {"bound_constants", c.bound_constants},
                 {"certificate_pass", c.pass},
                 {"pass", pass}};
    rep.samples.push_back({id, c.nondegeneracy_min});
  }
  rep.diagnostics["certificates"] = certs;
  rep.diagnostics["sample_spec"] = PhaseSampleSpec{}.describe();
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  rep.summary = ok ? "all phases certified" : "certification failed";
  return rep;
}

ExperimentReport check_multiplier_oracle(const RunConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const int n = cfg.n;
  const PhaseFunction phi = make_builtin_phase("linear", n);
  const Amplitude b = amplitude_of(cfg, cfg.orders);
  if (!b.separable()) throw ConfigError("key 'amplitude': multiplier oracle needs a separable amplitude");
  const QuadratureSpec quad = quad_of(cfg);
  const Grid g = make_grid(n, cfg.extent, cfg.points, Point{});
  const double R = cfg.q_list.front();
  const Field u = sample_field(g, [&](const Point& x) { return cplx(unit_bump(norm(x, n) / R)); },
                               quad.workers);
  const RadialCutoffs rc(quad.k_max);
  auto symbol = [&](const Point& xi) -> cplx {
    const double r = norm(xi, n);
    if (r < b.low_cutoff()) return 0.0;
    return rc.window(r, quad.k_min, quad.k_max) * b(Point{}, Point{}, xi);
  };
  const Field oracle = dft_multiplier_oracle(u, symbol, 4);
  const Field Tu = apply_T(b, phi, u, quad, Method::Polar);
  const Field Au = apply_A(b, phi, u, quad, Method::Polar);
  const double eT = relative_l2(Tu, oracle);
  const double eA = relative_l2(Au, oracle);
  rep.samples.push_back({"apply_T", eT});
  rep.samples.push_back({"apply_A", eA});
  rep.diagnostics["oracle_l2"] = lp_norm(oracle, 2.0);
  rep.diagnostics["tolerance"] = 1e-6;
  rep.verdict = (eT <= 1e-6 && eA <= 1e-6) ? Verdict::Pass : Verdict::Fail;
  rep.summary = "T " + fmt(eT) + " A " + fmt(eA);
  return rep;
}

ExperimentReport check_nq_inclusion(const RunConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const int n = cfg.n;
  const PhaseFunction phi = phase_of(cfg);
  const double M = cfg.m_override > 0.0 ? cfg.m_override : lemma_M_constant(phi, PhaseSampleSpec{});
  Rng rng(cfg.seed);
  bool ok = true;
  long long total = 0;
  for (int j = cfg.sweep_j_min; j <= cfg.sweep_j_max; j += std::max(1, cfg.sweep_j_max - cfg.sweep_j_min)) {
    for (double yr : cfg.y0_list) {
      const Point y0 = along_e1(yr, n);
      const Grid g = make_grid(n, cfg.extent, cfg.points, singular_center(phi, y0));
      const ExceptionalSet s = build_exceptional_set(phi, y0, j, M, g, cfg.c0);
      const double q = s.q;
      int inside = 0;
      for (int i = 0; i < cfg.samples; ++i) {
        Point y = y0;
        for (int d = 0; d < n; ++d) y[d] += q * (rng.uniform() - 0.5);
        Point w{};
        if (n == 1) {
          w[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        } else if (n == 2) {
          const double a = 2.0 * kPi * rng.uniform();
          w = {std::cos(a), std::sin(a), 0.0};
        } else {
          const double z = 2.0 * rng.uniform() - 1.0, a = 2.0 * kPi * rng.uniform();
          const double s2 = std::sqrt(1.0 - z * z);
          w = {s2 * std::cos(a), s2 * std::sin(a), z};
        }
        if (s.member(phi.grad_xi(y, w))) ++inside;
      }
      total += cfg.samples;
      if (inside != cfg.samples) ok = false;
      rep.samples.push_back({nlohmann::json{{"j", j}, {"y0", yr}},
                             static_cast<double>(inside) / cfg.samples});
      rep.diagnostics["M_used_j" + std::to_string(j)] = s.m_used;
    }
  }
  rep.diagnostics["M_measured"] = M;
  rep.diagnostics["points_tested"] = total;
  rep.verdict = (ok && cfg.samples >= 1000) ? Verdict::Pass : Verdict::Fail;
  rep.summary = std::string(ok ? "all" : "not all") + " of " + std::to_string(total) +
                " points inside";
  return rep;
}

ExperimentReport check_nq_measure(const RunConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const int n = cfg.n;
  const PhaseFunction phi = phase_of(cfg);
  const double M = cfg.m_override > 0.0 ? cfg.m_override : lemma_M_constant(phi, PhaseSampleSpec{});
  const Point y0 = along_e1(cfg.y0_list.front(), n);
  const Grid g = make_grid(n, cfg.extent, cfg.points, singular_center(phi, y0));
  std::vector<double> xs, ys;
  for (int j = cfg.sweep_j_min; j <= cfg.sweep_j_max; ++j) {
    const ExceptionalSet s = build_exceptional_set(phi, y0, j, M, g, cfg.c0);
    const auto [lo, hi] = rectangles_bounds(s);
    for (int d = 0; d < n; ++d)
      if (lo[d] < g.center[d] - g.extent || hi[d] > g.center[d] + g.extent)
        rep.diagnostics["warning"] = "rectangles leave the rasterization grid";
    const double v = s.volume_estimate;
    const double lv = v > 0.0 ? std::log2(v) : -INFINITY;
    rep.samples.push_back({j, lv});
    xs.push_back(j);
    ys.push_back(lv);
  }
  rep.diagnostics["M_measured"] = M;
  rep.fit = fit_if(xs, ys);
  rep.verdict = (rep.fit && rep.fit->slope >= -1.3 && rep.fit->slope <= -0.7) ? Verdict::Pass
                                                                             : Verdict::Fail;
  rep.summary = rep.fit ? "slope " + fmt(rep.fit->slope) : "no fit";
  return rep;
}

ExperimentReport check_rescaling_uniformity(const RunConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const int n = cfg.n;
  const double p = cfg.p_list.front();
  const double mp = -(n - 1) * std::abs(1.0 / p - 0.5);
  const Amplitude a = make_builtin_amplitude("sg_power_xi", n, Orders{mp, 0.0, mp}, cfg.flavor);
  std::map<std::string, std::pair<double, double>> range;
  nlohmann::json per_k = nlohmann::json::object();
  for (int k = cfg.sweep_k_min; k <= cfg.sweep_k_max; ++k) {
    const auto c = rescaled_symbol_constants(a, k, mp, 2);
    per_k[std::to_string(k)] = c;
    for (const auto& [key, v] : c) {
      auto it = range.find(key);
      if (it == range.end())
        range[key] = {v, v};
      else
        it->second = {std::min(it->second.first, v), std::max(it->second.second, v)};
    }
    rep.samples.push_back({k, c.at(index_key({MultiIndex{}, MultiIndex{}}, n))});
  }
  double worst = 0.0;
  nlohmann::json ratios = nlohmann::json::object();
  for (const auto& [key, mm] : range) {
    const double r = mm.first > 0.0 ? mm.second / mm.first : INFINITY;
    ratios[key] = std::isfinite(r) ? nlohmann::json(r) : nlohmann::json(nullptr);
    worst = std::max(worst, r);
  }
  rep.diagnostics["constants"] = per_k;
  rep.diagnostics["max_over_min"] = ratios;
  rep.diagnostics["worst_ratio"] = std::isfinite(worst) ? nlohmann::json(worst) : nlohmann::json(nullptr);
  rep.diagnostics["m_p"] = mp;

  // conjugation identity at k = cfg.j
  const int k = cfg.j;
  const PhaseFunction phi = phase_of(cfg);
  const Amplitude amp = amplitude_of(cfg, Orders{mp, 0.0, mp});
  QuadratureSpec quad = quad_of(cfg);
  const Grid g = make_grid(n, cfg.extent, cfg.points, Point{});
  const double s = std::ldexp(1.0, k);
  const double carrier = std::ldexp(1.0, quad.k_min + 3) + 4.0;
  const Field f = sample_field(
      g,
      [&](const Point& x) {
        Point d = x;
        d[0] -= 1.5 * s;
        return cplx(std::cos(carrier * x[0]) * std::exp(-0.5 * dot(d, d, n)));
      },
      quad.workers);
  Field lhs = apply_A(amp, phi, f, quad, Method::Auto);
  for (std::size_t i = 0; i < g.size(); ++i)
    lhs.values[i] *= lp_psi_tilde(norm(g.point(i), n) / s);
  const RescaledOperator op = rescaled_operator_symbols(amp, phi, k);
  QuadratureSpec q2 = quad;
  q2.k_min += k;
  q2.k_max += k;
  const Field g1 = dilate(f, s, DilationMode::Exact);
  const Field g2 = apply_A(op.amplitude, op.phase, g1, q2, Method::Auto);
  const Field rhs = dilate(g2, 1.0 / s, DilationMode::Exact);
  if (!same_geometry(rhs.grid, g)) throw DomainError("dilation did not restore the grid");
  const double err = relative_l2(rhs, lhs);
  rep.diagnostics["conjugation_k"] = k;
  rep.diagnostics["conjugation_rel_l2"] = err;
  rep.diagnostics["conjugation_lhs_l2"] = lp_norm(lhs, 2.0);
  rep.diagnostics["conjugation_tolerance"] = 1e-8;
  rep.verdict = (worst <= 2.0 && err <= 1e-8) ? Verdict::Pass : Verdict::Fail;
  rep.summary = "worst ratio " + fmt(worst) + " conjugation " + fmt(err);
  return rep;
}

ExperimentReport check_determinism(const RunConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  RunConfig target = parse_config(cfg.target_config);
  std::string reference;
  bool ok = true;
  for (int w : cfg.worker_list) {
    target.workers = w;
    const ExperimentReport r = run_experiment(target);
    const std::string dump = r.to_json().dump(2);
    if (reference.empty())
      reference = dump;
    else if (dump != reference)
      ok = false;
    rep.samples.push_back({w, static_cast<double>(dump.size())});
  }
  rep.diagnostics["target_experiment"] = target.experiment;
  rep.diagnostics["identical"] = ok;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  rep.summary = ok ? "byte-identical across worker counts" : "reports differ across worker counts";
  return rep;
}

}  // namespace fiolab
