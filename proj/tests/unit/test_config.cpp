#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fiolab/config.hpp"

using namespace fiolab;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsAndBasicKeys) {
  const RunConfig c = parse_config_text(
      "experiment = exp_kernel_decay_off_NQ  # trailing comment\n"
      "# full line comment\n\n"
      "n = 2\norders.m1 = -0.25\norders.mu = -1/2\ngrid.extent = 3\n");
  EXPECT_EQ(c.experiment, "exp_kernel_decay_off_NQ");
  EXPECT_EQ(c.phase, "shifted_wave");
  EXPECT_DOUBLE_EQ(c.orders.m1, -0.25);
  EXPECT_DOUBLE_EQ(c.orders.mu, -0.5);
  EXPECT_DOUBLE_EQ(c.extent, 3.0);
  EXPECT_EQ(c.max_points, 1LL << 24);
}

TEST(Config, FractionsInLists) {
  const RunConfig c =
      parse_config_text("experiment = exp_threshold_sweep\nthresholds.p = 1, 4/3, 2\n");
  ASSERT_EQ(c.p_list.size(), 3u);
  EXPECT_DOUBLE_EQ(c.p_list[1], 4.0 / 3.0);
}

TEST(Config, MuThresholdArithmetic) {
  const RunConfig c = parse_config_text("experiment = exp_h1_uniformity\norders.mu = -0.5\n");
  const double p = 1.0;
  const double mu_p = -(c.n - 1) * std::abs(1.0 / p - 0.5);
  EXPECT_EQ(c.orders.mu, mu_p);
}

TEST(Config, DuplicateKeyNamesKeyAndLines) {
  const std::string m = message_of("experiment = exp_h1_uniformity\nn = 2\n\nn = 3\n");
  EXPECT_NE(m.find("duplicate key 'n'"), std::string::npos) << m;
  EXPECT_NE(m.find("lines 2 and 4"), std::string::npos) << m;
}

TEST(Config, UnknownKeyRejected) {
  const std::string m = message_of("experiment = exp_h1_uniformity\ngrid.extnt = 3\n");
  EXPECT_NE(m.find("unknown key 'grid.extnt'"), std::string::npos) << m;
  EXPECT_NE(m.find(":2:"), std::string::npos) << m;
}

TEST(Config, BadValuesRejected) {
  EXPECT_NE(message_of("experiment = exp_h1_uniformity\nn = two\n").find("'n'"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = exp_h1_uniformity\ngrid.extent = 1/0\n").find("grid.extent"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = nope\n").find("unknown experiment"), std::string::npos);
  EXPECT_NE(message_of("n = 2\n").find("experiment"), std::string::npos);
  EXPECT_NE(message_of("experiment = exp_h1_uniformity\nphase = cubic\n").find("phase"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = exp_h1_uniformity\ndecomp.wave_k = 1\n").find("wave_k"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = exp_h1_uniformity\nbroken line\n").find("key = value"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = determinism\n").find("determinism.config"),
            std::string::npos);
}

TEST(Config, JointAndSplitOrdersConflict) {
  const std::string m =
      message_of("experiment = exp_h1_uniformity\norders.m = -1\norders.m1 = -1\n");
  EXPECT_NE(m.find("conflicts"), std::string::npos) << m;
  const RunConfig c = parse_config_text("experiment = exp_h1_uniformity\norders.m = -1\n");
  EXPECT_DOUBLE_EQ(c.orders.m(), -1.0);
}

TEST(Config, EchoExcludesWorkersAndOutput) {
  const RunConfig a =
      parse_config_text("experiment = exp_h1_uniformity\nworkers = 1\noutput_dir = x\n");
  const RunConfig b =
      parse_config_text("experiment = exp_h1_uniformity\nworkers = 4\noutput_dir = y\n");
  EXPECT_EQ(a.echo().dump(), b.echo().dump());
  EXPECT_FALSE(a.echo().contains("workers"));
  EXPECT_FALSE(a.echo().contains("output_dir"));
}

TEST(Config, RegistryNames) {
  const std::vector<std::string> expected = {
      "exp_kernel_decay_off_NQ", "exp_kernel_lipschitz", "exp_h1_uniformity",
      "exp_large_atom_bound",    "exp_threshold_sweep",  "exp_offdiagonal_decay",
      "exp_schwartz_tail"};
  EXPECT_EQ(experiment_names(), expected);
  EXPECT_EQ(check_names().size(), 7u);
  for (const auto& n : check_names()) EXPECT_TRUE(is_known_experiment(n));
  EXPECT_FALSE(is_known_experiment("exp_unknown"));
  const auto keys = config_keys();
  EXPECT_NE(std::find(keys.begin(), keys.end(), "decomp.M"), keys.end());
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(parse_config("/nonexistent/fiolab.cfg"), ConfigError);
}

TEST(Config, DeterminismTargetResolvedAgainstConfigDir) {
  const auto dir = std::filesystem::temp_directory_path() / "fiolab_cfg_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "det.cfg";
  {
    std::ofstream out(path);
    out << "experiment = determinism\ndeterminism.config = target.cfg\n";
  }
  const RunConfig c = parse_config(path.string());
  EXPECT_EQ(std::filesystem::path(c.target_config), dir / "target.cfg");
  EXPECT_EQ(c.echo()["determinism"]["config"], "target.cfg");
  std::filesystem::remove_all(dir);
}

TEST(Config, ShippedConfigsParse) {
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(FIOLAB_CONFIG_DIR)) {
    if (e.path().extension() != ".cfg") continue;
    SCOPED_TRACE(e.path().string());
    EXPECT_NO_THROW(parse_config(e.path().string()));
    ++count;
  }
  EXPECT_GE(count, 13);
}
