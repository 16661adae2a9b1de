#pragma once

#include <cstdint>
#include <vector>

#include "stefan/boundary.hpp"
#include "stefan/fixed_point.hpp"
#include "stefan/grids.hpp"
#include "stefan/model.hpp"
#include "stefan/monte_carlo.hpp"

namespace stefan::experiments {

// Agreement audit between the two evaluators of the same map at a fixed
// boundary.  The pass bound self-scales: statistical error via the MC
// confidence half-width, discretization error via one-step grid refinement.
struct FkGapReport {
  double gap = 0.0;                    // sup_t |F_pde(t) - F_mc(t)|
  double max_ci = 0.0;                 // largest 99% CI half-width over nodes
  double scheme_error_estimate = 0.0;  // |F_pde(coarse) - F_pde(refined)| sup norm
  bool pass = false;                   // gap <= 3 * (max_ci + scheme_error_estimate)
  std::vector<double> ci_profile;      // per-node CI half-widths
  BoundaryPath f_pde;
  BoundaryPath f_mc;
};

FkGapReport fk_cross_validate(const DensitySpec& f, const ModelParams& params,
                              const BoundaryPath& lambda, const SpaceGrid& xgrid,
                              const mc::EnsembleConfig& ensemble_cfg);

// One recorded ordering failure between adjacent widths in a sweep.
struct Violation {
  double eps_coarse = 0.0;  // larger width
  double eps_fine = 0.0;    // smaller width
  double t = 0.0;
  double magnitude = 0.0;   // Lambda_coarse(t) - Lambda_fine(t), > tol_mono
};

struct SweepReport {
  std::vector<double> epsilons;  // strictly decreasing
  std::vector<BoundaryPath> boundaries;
  BoundaryPath limit;
  std::vector<double> sup_distances;  // sup_t |Lambda_eps - limit| per eps
  std::vector<Violation> monotonicity_violations;
  std::vector<double> fk_gaps;  // per-eps evaluator gap at the solved boundary
  double tol_mono = 0.0;        // 2 * (solver tol + max CI half-width)
  std::vector<fixedpoint::SolveReport> solver_reports;
  fixedpoint::SolveReport limit_report;
  std::vector<FkGapReport> fk_reports;
};

struct SweepOptions {
  double limit_tol = 5e-4;
  std::int64_t limit_particles = 0;  // 0 reuses ensemble_cfg.n_particles
  bool with_fk_gaps = true;
};

// Shrinking-width study: solves the boundary at every width with a shared
// seed, solves the sharp-interface reference once, and audits the expected
// pointwise ordering (smaller width => larger boundary) and the shrinking
// distance to the reference.
SweepReport epsilon_sweep(const DensitySpec& f, double alpha, const std::vector<double>& epsilons,
                          const TimeGrid& tgrid, const fixedpoint::PicardConfig& picard_cfg,
                          const mc::EnsembleConfig& ensemble_cfg,
                          const SweepOptions& options = {});

}  // namespace stefan::experiments
