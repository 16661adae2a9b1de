#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stefan/boundary.hpp"
#include "stefan/grids.hpp"
#include "stefan/model.hpp"
#include "stefan/monte_carlo.hpp"

namespace stefan::fixedpoint {

enum class Evaluator { pde, mc };

// Controls for the windowed Picard iteration.  The iteration map is a
// contraction only on short time windows, so the grid is processed left to
// right in windows of `window_steps` steps; a window that fails to settle
// within max_iter sweeps is halved and retried.
struct PicardConfig {
  Evaluator evaluator = Evaluator::pde;
  double tol = 1e-4;        // sup-norm acceptance tolerance on the boundary
  int max_iter = 50;        // map evaluations per window attempt
  int window_steps = 0;     // initial window length; 0 picks eps^2/(4 sup^2 dt)
  int min_window_steps = 1; // halving floor
  mc::EnsembleConfig ensemble;  // mc evaluator settings (seed fixed across sweeps)
  std::optional<SpaceGrid> xgrid;       // pde evaluator grid; defaults from the data
};

struct EvaluatorStats {
  std::vector<double> window_residuals;  // accepted residual per window
  std::vector<int> window_sizes;         // accepted window length in steps
  std::int64_t n_evaluations = 0;        // total map evaluations
  double max_ci_halfwidth = 0.0;         // mc evaluator: largest 99% CI half-width seen
};

struct SolveReport {
  BoundaryPath boundary;
  std::vector<int> iterations_per_window;
  double residual = 0.0;  // sup_t |F(boundary)(t) - boundary(t)|, measured
  int window_halvings = 0;
  EvaluatorStats evaluator_stats;
};

// Dimensional analogue of the admissible window length: the contraction
// factor scales like sup^2 h / eps^2, so h ~ eps^2 / (4 sup^2).
int default_window_steps(double epsilon, double f_sup, double dt);

// Self-consistent boundary of the width-eps model: the unique path with
// F(Lambda) = Lambda, found by windowed Picard iteration from 0.  The
// reported residual is measured on the raw evaluator output, never on
// clamped values, so it cannot mask a failure to contract.
SolveReport solve_regularized(const DensitySpec& f, const ModelParams& params,
                              const TimeGrid& tgrid, const PicardConfig& cfg);

// Sharp-interface problem alpha*Lambda(t) = 2 P(first hit <= t): monotone
// iteration from 0 under common random numbers, which makes the sweeps a
// deterministic, pointwise non-decreasing sequence.
SolveReport solve_limit(const DensitySpec& f, const ModelParams& params, const TimeGrid& tgrid,
                        const mc::EnsembleConfig& cfg, double tol);

}  // namespace stefan::fixedpoint
