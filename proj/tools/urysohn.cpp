#include <iostream>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  using namespace urysohn::cli;
  CLI::App app{"Finite approximation of trajectory sets of Urysohn-type control systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  bool dry_run = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "run the approximation experiment described by a config file");
  run->add_option("config", config_path, "INI config file")->required();
  run->add_flag("--dry-run", dry_run, "print the resolved schedules and family sizes, write nothing");
  run->add_option("--seed", seed, "override [experiment] seed");
  run->add_option("--out", out_dir, "override [output] dir");

  std::string system;
  urysohn::Index grid = 64;
  auto* constants = app.add_subcommand("constants", "print the approximation constants of a system");
  constants->add_option("system", system, "built-in system name or config file")->required();
  constants->add_option("--grid", grid, "cells per axis of the quadrature grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (*constants)
    return constants_command(system, grid, std::cout, std::cerr);

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const urysohn::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (seed)
    cfg.seed = *seed;
  if (out_dir)
    cfg.out_dir = *out_dir;
  return run_command(cfg, dry_run, std::cout, std::cerr);
}
