#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "landau/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Regularised Landau equation toolkit"};
  app.set_version_flag("--version", std::string(landau::cli::kVersion));
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config, "configuration file")->required();

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("config", validate_config, "configuration file")->required();

  std::string dir_a, dir_b;
  auto* compare = app.add_subcommand("compare", "compare the outputs of two runs");
  compare->add_option("dirA", dir_a, "first run directory")->required();
  compare->add_option("dirB", dir_b, "second run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*run) return landau::cli::run_command(config, std::cout, std::cerr);
  if (*validate) return landau::cli::validate_command(validate_config, std::cout, std::cerr);
  return landau::cli::compare_command(dir_a, dir_b, std::cout, std::cerr);
}
