#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fiolab/cli.hpp"
#include "fiolab/harness.hpp"

using namespace fiolab;

TEST(Harness, LeastSquaresRecoversLine) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(-1.25 * v + 3.0);
  const Fit f = least_squares(x, y);
  EXPECT_NEAR(f.slope, -1.25, 1e-14);
  EXPECT_NEAR(f.intercept, 3.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
}

TEST(Harness, LeastSquaresAgainstNormalEquations) {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5};
  const std::vector<double> y = {0.3, 0.9, 2.4, 2.8, 4.5, 4.6};
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double r = (n * sxy - sx * sy) /
                   std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  const Fit f = least_squares(x, y);
  EXPECT_NEAR(f.slope, slope, 1e-13);
  EXPECT_NEAR(f.intercept, (sy - slope * sx) / n, 1e-13);
  EXPECT_NEAR(f.r2, r * r, 1e-13);
}

TEST(Harness, LeastSquaresRejectsDegenerateInput) {
  EXPECT_THROW(least_squares({1.0}, {2.0}), DomainError);
  EXPECT_THROW(least_squares({1.0, 1.0}, {2.0, 3.0}), DomainError);
  EXPECT_THROW(least_squares({1.0, 2.0}, {2.0}), DomainError);
}

TEST(Harness, ReportJsonAndCsv) {
  ExperimentReport r;
  r.experiment = "exp_test";
  r.params = {{"n", 2}};
  r.samples.push_back({1, 0.5});
  r.samples.push_back({nlohmann::json{{"q", 0.25}, {"y0", 4}}, NAN});
  r.fit = Fit{-1.0, 0.0, 0.99};
  r.verdict = Verdict::Pass;
  const auto j = r.to_json();
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_TRUE(j["samples"][1][1].is_null());
  EXPECT_EQ(j["fit"]["slope"], -1.0);
  EXPECT_EQ(r.to_csv(), "x,y\n1,0.5\nq=0.25;y0=4,\n");
  r.fit.reset();
  EXPECT_TRUE(r.to_json()["fit"].is_null());
}

TEST(Harness, VerdictStringsAndExitCodes) {
  EXPECT_EQ(to_string(Verdict::Exploratory), "exploratory");
  ExperimentReport r;
  r.verdict = Verdict::Pass;
  EXPECT_EQ(exit_code(r), 0);
  r.verdict = Verdict::Exploratory;
  EXPECT_EQ(exit_code(r), 0);
  r.verdict = Verdict::Fail;
  EXPECT_EQ(exit_code(r), 1);
}

TEST(Harness, WriteReportCreatesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "fiolab_report_test";
  std::filesystem::remove_all(dir);
  ExperimentReport r;
  r.experiment = "exp_test";
  r.samples.push_back({1, 2.0});
  write_report(r, dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "exp_test.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "exp_test.csv"));
  std::ifstream in(dir / "exp_test.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["experiment"], "exp_test");
  std::filesystem::remove_all(dir);
}

TEST(Harness, UnknownExperimentIsConfigError) {
  RunConfig c;
  c.experiment = "nothing";
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Harness, DegenerateLipschitzIsZero) {
  RunConfig c = parse_config_text(
      "experiment = exp_kernel_lipschitz\namplitude = zero\ngrid.extent = 3\n"
      "quad.k_max = 4\ndecomp.j = 4\nsweep.k_min = 1\nsweep.k_max = 3\nworkers = 1\n");
  const ExperimentReport r = run_experiment(c);
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_TRUE(r.diagnostics.contains("error"));
}

TEST(Harness, LargeAtomBoundRunsAndAgreesWithClosedForm) {
  RunConfig c = parse_config_text(
      "experiment = exp_large_atom_bound\ngrid.points = 512\ndecomp.q = 1, 4\n"
      "decomp.y0 = 0, 8\nworkers = 1\n");
  const ExperimentReport r = run_experiment(c);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_LE(r.diagnostics["grid_vs_closed_form_max_rel"].get<double>(), 2e-2);
  EXPECT_EQ(r.samples.size(), 4u);
}

TEST(Harness, PartitionCheckPasses) {
  RunConfig c = parse_config_text(
      "experiment = partition_exactness\nquad.k_max = 8\ndecomp.y0 = 0, 4\nworkers = 1\n");
  EXPECT_EQ(run_experiment(c).verdict, Verdict::Pass);
}

TEST(Harness, SameConfigGivesIdenticalJson) {
  const std::string text =
      "experiment = exp_schwartz_tail\nquad.k_max = 3\nray.samples = 4\nray.t_max = 16\n";
  RunConfig a = parse_config_text(text + "workers = 1\n");
  RunConfig b = parse_config_text(text + "workers = 3\n");
  EXPECT_EQ(run_experiment(a).to_json().dump(2), run_experiment(b).to_json().dump(2));
}

TEST(Cli, ListPrintsSevenExperiments) {
  std::ostringstream out;
  EXPECT_EQ(cli_list(false, out), 0);
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  EXPECT_EQ(lines, experiment_names());
}

TEST(Cli, RunExitCodes) {
  const auto dir = std::filesystem::temp_directory_path() / "fiolab_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "bad.cfg";
  {
    std::ofstream f(cfg);
    f << "experiment = exp_kernel_decay_off_NQ\nquad.oversample = 0.1\ngrid.extent = 3\n"
         "quad.k_max = 4\nsweep.k_min = 3\nsweep.k_max = 4\n";
  }
  std::ostringstream out, err;
  EXPECT_EQ(cli_run(cfg.string(), dir.string(), 1, out, err), 2);
  EXPECT_NE(err.str().find("required"), std::string::npos) << err.str();
  std::ostringstream out2, err2;
  EXPECT_EQ(cli_run((dir / "missing.cfg").string(), dir.string(), 1, out2, err2), 2);
  const auto good = dir / "good.cfg";
  {
    std::ofstream f(good);
    f << "experiment = partition_exactness\nquad.k_max = 6\n";
  }
  std::ostringstream out3, err3;
  EXPECT_EQ(cli_run(good.string(), (dir / "out").string(), 1, out3, err3), 0);
  EXPECT_NE(out3.str().find("partition_exactness"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "partition_exactness.json"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, CertifyFlavorI) {
  std::ostringstream out, err;
  EXPECT_EQ(cli_certify("shifted_wave", "I", 2, out, err), 0) << err.str();
  std::ostringstream out2, err2;
  EXPECT_EQ(cli_certify("nope", "I", 2, out2, err2), 2);
  std::ostringstream out3, err3;
  EXPECT_EQ(cli_certify("linear", "IV", 2, out3, err3), 2);
}
