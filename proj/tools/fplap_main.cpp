#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fplap/errors.hpp"
#include "fplap/harness.hpp"
#include "fplap/version.hpp"

using namespace fplap;

int main(int argc, char** argv) {
  CLI::App app{"fplap: variational solver and verification suite for the "
               "fractional p-Laplacian Dirichlet problem on sampled compact "
               "manifolds"};
  app.set_version_flag("--version", std::string("fplap ") + kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  long seed_override = -1;
  std::string kernel_dump;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")
        ->required();
    cmd->add_option("--seed", seed_override, "override [run] seed");
    cmd->add_option("--out", out_override, "override [run] out directory");
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "produce a weak solution (direct or mountain-pass regime)");
  add_common(solve);
  CLI::App* verify = app.add_subcommand(
      "verify", "run inequality checks and (f1)-(f5) certificates");
  add_common(verify);
  CLI::App* study = app.add_subcommand(
      "study", "resolution ladder or multi-start uniqueness study");
  add_common(study);
  CLI::App* mesh_info =
      app.add_subcommand("mesh-info", "build, validate and describe a mesh");
  add_common(mesh_info);
  mesh_info->add_option("--dump-kernel", kernel_dump,
                        "also write a kernel CSV dump to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_override >= 0) {
      cfg.seed = static_cast<std::uint64_t>(seed_override);
      cfg.solver.seed = cfg.seed;
    }
    if (!out_override.empty()) cfg.out_dir = out_override;

    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (study->parsed()) return cmd_study(cfg);
    return cmd_mesh_info(cfg, kernel_dump);
  } catch (const EndpointNotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
