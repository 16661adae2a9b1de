#include "stefan/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/errors.hpp"
#include "stefan/mollify.hpp"
#include "stefan/robin_pde.hpp"

namespace stefan::experiments {
namespace {

// Linear interpolation of a piecewise-linear boundary onto the grid with
// doubled resolution; preserves the Lipschitz bound exactly.
BoundaryPath refine_boundary(const BoundaryPath& lambda) {
  const TimeGrid fine(lambda.grid.t_max, 2 * lambda.grid.n_steps);
  std::vector<double> v(fine.n_nodes());
  for (int k = 0; k < lambda.grid.n_nodes(); ++k) v[2 * k] = lambda.values[k];
  for (int k = 0; k < lambda.grid.n_steps; ++k)
    v[2 * k + 1] = 0.5 * (lambda.values[k] + lambda.values[k + 1]);
  return BoundaryPath{fine, std::move(v), lambda.lipschitz_bound};
}

}  // namespace

FkGapReport fk_cross_validate(const DensitySpec& f, const ModelParams& params,
                              const BoundaryPath& lambda, const SpaceGrid& xgrid,
                              const mc::EnsembleConfig& ensemble_cfg) {
  validate_model(f, params);
  if (!(params.epsilon > 0.0))
    raise(ErrorCode::NonPositiveEpsilon, "fk_cross_validate needs epsilon > 0");

  const MollifiedDensity f_eps = mollify(f, params.epsilon);
  pde::SolveOptions popt;
  popt.store = pde::SolveOptions::Store::off;

  FkGapReport rep;
  {
    const pde::DensityField field = pde::solve_robin_pde(f_eps, lambda, params, xgrid, popt);
    rep.f_pde = pde::evaluate_F_pde(field, params);
  }
  {
    // same scheme at doubled resolution in t and x, restricted back to the
    // coarse nodes: a first-order error estimate for the coarse solve
    const SpaceGrid xfine(xgrid.x_max, 2 * xgrid.n_cells);
    const BoundaryPath lam_fine = refine_boundary(lambda);
    const pde::DensityField field = pde::solve_robin_pde(f_eps, lam_fine, params, xfine, popt);
    const BoundaryPath f_fine = pde::evaluate_F_pde(field, params);
    for (int k = 0; k < lambda.grid.n_nodes(); ++k)
      rep.scheme_error_estimate =
          std::max(rep.scheme_error_estimate, std::abs(f_fine.values[2 * k] - rep.f_pde.values[k]));
  }

  const mc::LocalTimeEnsemble ens =
      mc::simulate_ensemble(f, params.epsilon, lambda, ensemble_cfg);
  rep.f_mc = mc::evaluate_F_mc(ens, params);
  rep.ci_profile.resize(lambda.grid.n_nodes());
  for (int k = 0; k < lambda.grid.n_nodes(); ++k) {
    rep.ci_profile[k] = mc::ci_halfwidth(ens, params, lambda.grid.t(k));
    rep.max_ci = std::max(rep.max_ci, rep.ci_profile[k]);
  }

  rep.gap = sup_diff(rep.f_pde, rep.f_mc);
  rep.pass = rep.gap <= 3.0 * (rep.max_ci + rep.scheme_error_estimate);
  return rep;
}

SweepReport epsilon_sweep(const DensitySpec& f, double alpha, const std::vector<double>& epsilons,
                          const TimeGrid& tgrid, const fixedpoint::PicardConfig& picard_cfg,
                          const mc::EnsembleConfig& ensemble_cfg,
                          const SweepOptions& options) {
  if (epsilons.empty())
    raise(ErrorCode::PreconditionFailed, "epsilon_sweep needs at least one width");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0))
      raise(ErrorCode::NonPositiveEpsilon, "epsilon_sweep widths must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      raise(ErrorCode::PreconditionFailed, "epsilon_sweep widths must be strictly decreasing");
  }

  SweepReport rep;
  rep.epsilons = epsilons;

  fixedpoint::PicardConfig picard = picard_cfg;
  picard.ensemble = ensemble_cfg;  // shared seed across widths: common random numbers

  double max_ci = 0.0;
  for (double eps : epsilons) {
    const ModelParams params{alpha, eps};
    fixedpoint::SolveReport solved = fixedpoint::solve_regularized(f, params, tgrid, picard);
    max_ci = std::max(max_ci, solved.evaluator_stats.max_ci_halfwidth);
    rep.boundaries.push_back(solved.boundary);
    rep.solver_reports.push_back(std::move(solved));
  }

  mc::EnsembleConfig limit_cfg = ensemble_cfg;
  if (options.limit_particles > 0) limit_cfg.n_particles = options.limit_particles;
  rep.limit_report =
      fixedpoint::solve_limit(f, ModelParams{alpha, 0.0}, tgrid, limit_cfg, options.limit_tol);
  rep.limit = rep.limit_report.boundary;

  for (const BoundaryPath& b : rep.boundaries) rep.sup_distances.push_back(sup_diff(b, rep.limit));

  rep.tol_mono = 2.0 * (picard.tol + max_ci);
  for (std::size_t i = 0; i + 1 < rep.boundaries.size(); ++i) {
    const BoundaryPath& coarse = rep.boundaries[i];      // larger width
    const BoundaryPath& fine = rep.boundaries[i + 1];    // smaller width, expected larger
    for (int k = 0; k < tgrid.n_nodes(); ++k) {
      const double d = coarse.values[k] - fine.values[k];
      if (d > rep.tol_mono)
        rep.monotonicity_violations.push_back({epsilons[i], epsilons[i + 1], tgrid.t(k), d});
    }
  }

  if (options.with_fk_gaps) {
    const SpaceGrid xgrid = picard.xgrid
                                ? *picard.xgrid
                                : SpaceGrid(default_x_max(f.support_upper() + epsilons.front(),
                                                          tgrid.t_max),
                                            1024);
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      FkGapReport gap = fk_cross_validate(f, ModelParams{alpha, epsilons[i]}, rep.boundaries[i],
                                          xgrid, ensemble_cfg);
      rep.fk_gaps.push_back(gap.gap);
      rep.fk_reports.push_back(std::move(gap));
    }
  }
  return rep;
}

}  // namespace stefan::experiments
