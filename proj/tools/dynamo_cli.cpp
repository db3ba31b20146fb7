#include <CLI11.hpp>

#include <iostream>

#include "dynamo/config.hpp"
#include "dynamo/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kinematic dynamo solver on stretched and conformally rescaled metrics"};
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  app.add_option("command", command, "evolve | curvature | fluxrope | catmap | verify-all")->required();
  app.add_option("--config", config_path, "key = value config file with [section] headers");
  app.add_option("--out", out_dir, "directory for output artifacts");
  app.add_option("--seed", seed, "seed for synthetic initial fields");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  dynamo::RunConfig config;
  try {
    config.command = dynamo::parse_command(command);
    if (!config_path.empty()) dynamo::load_config(config_path, config);
  } catch (const dynamo::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  config.out_dir = out_dir;
  config.seed = seed;
  return dynamo::run(config, std::cout, std::cerr);
}
