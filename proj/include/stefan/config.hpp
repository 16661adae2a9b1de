#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stefan/density.hpp"
#include "stefan/fixed_point.hpp"
#include "stefan/grids.hpp"

namespace stefan::cli {

enum class Mode { solve_regularized, solve_limit, sweep, fk_validate };

const char* mode_name(Mode m);

// Fully resolved run description.  Parsing is strict: unknown keys anywhere
// in the document are rejected, so typos fail loudly instead of silently
// running defaults.
struct RunConfig {
  Mode mode = Mode::solve_regularized;
  DensitySpec density = DensitySpec::uniform(0.0, 1.0);
  double alpha = 1.0;
  std::vector<double> epsilons;  // singleton for single-width modes
  TimeGrid tgrid;
  std::optional<SpaceGrid> xgrid;
  fixedpoint::PicardConfig picard;  // carries the ensemble settings
  double limit_tol = 5e-4;
  std::int64_t limit_particles = 0;    // 0 reuses ensemble n_particles
  bool fk_gaps = true;                 // sweep: also cross-validate per width
  bool fk_at_solved = false;           // fk_validate: audit at the solved boundary
  std::string output_dir = ".";
  std::uint64_t config_hash = 0;  // FNV-1a of the raw config bytes
};

std::uint64_t fnv1a64(const std::string& bytes);

RunConfig parse_run_config_text(const std::string& text);
RunConfig parse_run_config(const std::string& path);

}  // namespace stefan::cli
