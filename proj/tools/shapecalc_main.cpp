#include "shapecalc/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace shapecalc;

namespace {

struct Flags {
  std::string config;
  int mesh_level = -1;
  std::string out;
  int threads = 1;
  std::uint64_t seed = 1;
  bool flip_kappa = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Experiment config (INI); built-in annulus defaults if omitted");
  cmd->add_option("--mesh-level", f.mesh_level, "Override mesh.level")->check(CLI::Range(0, 5));
  cmd->add_option("--out", f.out, "Override output.dir");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::Range(1, 256));
  cmd->add_option("--seed", f.seed, "Seed for randomized eigensolver starts");
}

cli::ExperimentConfig resolve(const Flags& f) {
  auto cfg = f.config.empty() ? cli::ExperimentConfig{} : cli::load_config(f.config);
  if (f.mesh_level >= 0) cfg.level = f.mesh_level;
  if (!f.out.empty()) cfg.output_dir = f.out;
  cfg.threads = f.threads;
  cfg.seed = f.seed;
  cfg.flip_kappa = f.flip_kappa;
  cli::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D shape calculus toolkit: flow operators, shape derivatives, adjoint checks"};
  app.require_subcommand(1);
  bool show_reference = false;
  app.add_flag("--config-reference", show_reference, "Print all config keys with defaults and exit");

  Flags f;
  int index = 0;
  std::string field, mesh_path;

  auto* solve = app.add_subcommand("solve", "Evaluate S on the wall; write profile and field CSV");
  add_common(solve, f);
  auto* lin = app.add_subcommand("linearize", "Evaluate dS for one basis member or a field spec");
  add_common(lin, f);
  lin->add_option("--index", index, "Basis member index");
  lin->add_option("--field", field, "Normal speed spec, e.g. 'bump 0 3.0 2.0 * 0.5'");
  auto* verify = app.add_subcommand("verify", "Run Taylor, FD, identity, Hadamard and probe checks");
  add_common(verify, f);
  verify->add_flag("--debug-flip-kappa", f.flip_kappa, "Mutation test: use -kappa in the potential identity");
  auto* ctrl = app.add_subcommand("control", "Residual study of the controllability fit");
  add_common(ctrl, f);
  auto* imp = app.add_subcommand("mesh-import", "Read a Gmsh 2.2 or plain-text mesh and re-export it");
  add_common(imp, f);
  imp->add_option("--mesh", mesh_path, "Mesh file")->required();
  auto* exp = app.add_subcommand("mesh-export", "Write the configured mesh and its wall quadrature");
  add_common(exp, f);

  // The reference page needs no subcommand.
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--config-reference") {
      std::cout << cli::config_reference();
      return cli::kOk;
    }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kUsage;
  }

  try {
    const auto cfg = resolve(f);
    if (solve->parsed()) return cli::cmd_solve(cfg, std::cout);
    if (lin->parsed()) return cli::cmd_linearize(cfg, index, field, std::cout);
    if (verify->parsed()) return cli::cmd_verify(cfg, std::cout);
    if (ctrl->parsed()) return cli::cmd_control(cfg, std::cout);
    if (imp->parsed()) return cli::cmd_mesh_import(cfg, mesh_path, std::cout);
    if (exp->parsed()) return cli::cmd_mesh_export(cfg, std::cout);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kVerificationFailed;
  }
  return cli::kUsage;
}
