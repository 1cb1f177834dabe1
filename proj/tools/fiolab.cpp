#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fiolab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fiolab: numerical lab for global Fourier integral operators"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment or acceptance check from a config");
  std::string config;
  std::string out_dir;
  int workers = 0;
  run->add_option("--config", config, "config file")->required();
  auto* out_opt = run->add_option("--out", out_dir, "output directory");
  auto* workers_opt = run->add_option("--workers", workers, "worker threads");

  auto* list = app.add_subcommand("list", "print the experiment names");
  bool all = false;
  list->add_flag("--all", all, "also print the acceptance checks");

  auto* certify = app.add_subcommand("certify", "certify a built-in phase and symbols");
  std::string phase;
  std::string flavor;
  int dim = 2;
  certify->add_option("--phase", phase, "phase id")->required();
  certify->add_option("--flavor", flavor, "I, II or III")->required();
  certify->add_option("--n", dim, "dimension")->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*run) {
    std::optional<std::string> out;
    if (*out_opt) out = out_dir;
    std::optional<int> w;
    if (*workers_opt) w = workers;
    return fiolab::cli_run(config, out, w, std::cout, std::cerr);
  }
  if (*list) return fiolab::cli_list(all, std::cout);
  return fiolab::cli_certify(phase, flavor, dim, std::cout, std::cerr);
}
