#include <CLI11.hpp>

#include "proxmin/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"composite proximal-linearization solver and trace verifier"};
  app.require_subcommand(1);

  std::string config_path, trace_path, batch_dir;
  proxmin::cli::Overrides ov;
  std::string scheme, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> checks;

  auto* solve = app.add_subcommand("solve", "run a scheme on a problem config");
  solve->add_option("--config", config_path, "problem + scheme config (JSON)");
  solve->add_option("--batch", batch_dir, "directory of configs to run concurrently");
  solve->add_option("--scheme", scheme, "prox|accel (overrides config)");
  solve->add_option("--check", checks, "diagnostic checks to run after the solve");
  solve->add_option("--out", out_dir, "output directory");
  solve->add_option("--seed", seed, "instance seed override")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* verify = app.add_subcommand("verify", "re-check a persisted trace");
  verify->add_option("--trace", trace_path, "trace CSV")->required();
  verify->add_option("--config", config_path, "problem config (JSON)")->required();
  verify->add_option("--check", checks, "checks to run")->required();

  CLI11_PARSE(app, argc, argv);

  if (!scheme.empty()) ov.scheme = scheme;
  if (!out_dir.empty()) ov.out_dir = out_dir;
  if (seed_set) ov.seed = seed;
  ov.checks = checks;

  if (solve->parsed()) {
    if (!batch_dir.empty()) return proxmin::cli::run_batch(batch_dir, ov);
    if (config_path.empty()) {
      std::cerr << "solve: --config or --batch is required\n";
      return 2;
    }
    return proxmin::cli::run_solve(config_path, ov);
  }
  return proxmin::cli::run_verify(trace_path, config_path, checks);
}
