#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "stefan/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "stefan: freezing-front solver suite (fixed-point boundary solves, particle/grid "
      "cross-validation, width sweeps)"};

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  int threads = 0;

  app.add_option("--config", config_path, "run configuration file (JSON)")->required();
  auto* out_opt = app.add_option("--output", output_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides config)");
  auto* thr_opt =
      app.add_option("--threads", threads, "worker threads, 0 = hardware (wall time only)");

  CLI11_PARSE(app, argc, argv);

  stefan::cli::RunOverrides overrides;
  if (out_opt->count()) overrides.output_dir = output_dir;
  if (seed_opt->count()) overrides.seed = seed;
  if (thr_opt->count()) overrides.n_threads = threads;
  return stefan::cli::run(config_path, overrides);
}
