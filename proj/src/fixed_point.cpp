#include "stefan/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "stefan/errors.hpp"
#include "stefan/mollify.hpp"
#include "stefan/robin_pde.hpp"

namespace stefan::fixedpoint {
namespace {

// Evaluates the iteration map on the active window while holding the
// already-accepted prefix [0, k0] frozen.  Both backends checkpoint their
// state at k0, so a window sweep costs O(window), not O(t).
class WindowEvaluator {
 public:
  virtual ~WindowEvaluator() = default;
  // Fills F on nodes [checkpoint(), k1]; lam must agree with the committed
  // prefix on [0, checkpoint()].
  virtual void evaluate(const BoundaryPath& lam, int k1, std::vector<double>& F) = 0;
  virtual void commit(const BoundaryPath& lam, int k1) = 0;
  virtual int checkpoint() const = 0;
  virtual double last_max_ci() const { return 0.0; }
};

class PdeWindowEvaluator final : public WindowEvaluator {
 public:
  PdeWindowEvaluator(const MollifiedDensity& f_eps, const ModelParams& params,
                     const TimeGrid& tgrid, const SpaceGrid& xgrid)
      : stepper_(f_eps, params, tgrid, xgrid),
        half_dt_over_eps_(0.5 * tgrid.dt / params.epsilon),
        state_(stepper_.initial_state()),
        trace_at_k0_(state_[0]) {}

  void evaluate(const BoundaryPath& lam, int k1, std::vector<double>& F) override {
    scratch_ = state_;
    F[k0_] = F_at_k0_;
    double tr = trace_at_k0_;
    stepper_.advance(scratch_, k0_, k1, lam.values.data(),
                     [&](int k, const std::vector<double>& p) {
                       F[k] = F[k - 1] + half_dt_over_eps_ * (tr + p[0]);
                       tr = p[0];
                     });
  }

  void commit(const BoundaryPath& lam, int k1) override {
    double tr = trace_at_k0_;
    stepper_.advance(state_, k0_, k1, lam.values.data(),
                     [&](int, const std::vector<double>& p) {
                       F_at_k0_ += half_dt_over_eps_ * (tr + p[0]);
                       tr = p[0];
                     });
    trace_at_k0_ = tr;
    k0_ = k1;
  }

  int checkpoint() const override { return k0_; }

 private:
  pde::RobinStepper stepper_;
  double half_dt_over_eps_;
  std::vector<double> state_, scratch_;
  double F_at_k0_ = 0.0;
  double trace_at_k0_;
  int k0_ = 0;
};

class McWindowEvaluator final : public WindowEvaluator {
 public:
  McWindowEvaluator(const DensitySpec& f, const ModelParams& params, const TimeGrid& tgrid,
                    const mc::EnsembleConfig& cfg)
      : sys_(f, params.epsilon, tgrid, cfg),
        alpha_(params.alpha),
        n_(static_cast<double>(cfg.n_particles)) {}

  void evaluate(const BoundaryPath& lam, int k1, std::vector<double>& F) override {
    sys_.window_exp_sums(lam, k1, alpha_, sum_, &sumsq_);
    const int k0 = sys_.frozen_step();
    const double scale = 2.0 / alpha_;
    last_ci_ = 0.0;
    for (int k = k0; k <= k1; ++k) {
      const double s = sum_[k - k0];
      F[k] = scale * (1.0 - s / n_);
      if (n_ > 1.5) {
        const double var = std::max(0.0, (sumsq_[k - k0] - s * s / n_) / (n_ - 1.0));
        last_ci_ = std::max(last_ci_, 2.576 * scale * std::sqrt(var / n_));
      }
    }
  }

  void commit(const BoundaryPath& lam, int k1) override { sys_.commit(lam, k1); }
  int checkpoint() const override { return sys_.frozen_step(); }
  double last_max_ci() const override { return last_ci_; }

 private:
  mc::ParticleSystem sys_;
  double alpha_, n_;
  std::vector<double> sum_, sumsq_;
  double last_ci_ = 0.0;
};

SpaceGrid default_space_grid(const MollifiedDensity& f_eps, const TimeGrid& tgrid) {
  const double x_max = default_x_max(f_eps.support_upper(), tgrid.t_max);
  // resolve the boundary layer (width eps) with >= 8 cells, and never coarser
  // than 1/64 regardless
  const double target_dx = std::min(f_eps.epsilon() / 8.0, 1.0 / 64.0);
  const int n_cells = std::max(128, static_cast<int>(std::ceil(x_max / target_dx)));
  return SpaceGrid(x_max, n_cells);
}

void require_picard_config(const PicardConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.min_window_steps < 1 ||
      (cfg.window_steps != 0 && cfg.window_steps < cfg.min_window_steps))
    raise(ErrorCode::PreconditionFailed,
          "picard config needs tol > 0, max_iter >= 1, window_steps >= min_window_steps >= 1");
}

}  // namespace

int default_window_steps(double epsilon, double f_sup, double dt) {
  const double h = epsilon * epsilon / (4.0 * f_sup * f_sup);
  const double steps = h / dt;
  if (!std::isfinite(steps) || steps < 1.0) return 1;
  if (steps > 1e9) return 1 << 30;
  return static_cast<int>(std::llround(steps));
}

SolveReport solve_regularized(const DensitySpec& f, const ModelParams& params,
                              const TimeGrid& tgrid, const PicardConfig& cfg) {
  validate_model(f, params);
  if (!(params.epsilon > 0.0))
    raise(ErrorCode::NonPositiveEpsilon, "solve_regularized needs epsilon > 0");
  require_picard_config(cfg);

  const MollifiedDensity f_eps = mollify(f, params.epsilon);
  const double f_sup = f_eps.sup_norm();
  const double lip = f_sup / params.epsilon;
  const double cap = lip * tgrid.dt;

  std::unique_ptr<WindowEvaluator> eval;
  if (cfg.evaluator == Evaluator::pde) {
    const SpaceGrid xgrid = cfg.xgrid ? *cfg.xgrid : default_space_grid(f_eps, tgrid);
    eval = std::make_unique<PdeWindowEvaluator>(f_eps, params, tgrid, xgrid);
  } else {
    eval = std::make_unique<McWindowEvaluator>(f, params, tgrid, cfg.ensemble);
  }

  const int n_nodes = tgrid.n_nodes();
  BoundaryPath lam{tgrid, std::vector<double>(n_nodes, 0.0), lip};
  std::vector<double> F(n_nodes, 0.0);

  SolveReport report;
  int window = cfg.window_steps > 0 ? cfg.window_steps : default_window_steps(params.epsilon, f_sup, tgrid.dt);
  window = std::clamp(window, cfg.min_window_steps, std::max(cfg.min_window_steps, tgrid.n_steps));

  int k0 = 0;
  while (k0 < tgrid.n_steps) {
    const int k1 = std::min(k0 + window, tgrid.n_steps);
    // fresh attempt: constant extension of the accepted endpoint
    std::fill(lam.values.begin() + k0 + 1, lam.values.begin() + k1 + 1, lam.values[k0]);

    double residual = 0.0;
    bool accepted = false;
    int iters = 0;
    while (iters < cfg.max_iter) {
      ++iters;
      eval->evaluate(lam, k1, F);
      ++report.evaluator_stats.n_evaluations;
      residual = 0.0;
      for (int k = k0 + 1; k <= k1; ++k)
        residual = std::max(residual, std::abs(F[k] - lam.values[k]));
      if (residual <= cfg.tol) {
        accepted = true;
        break;
      }
      // next iterate: map output, clamped to the invariant set
      for (int k = k0 + 1; k <= k1; ++k)
        lam.values[k] = std::min(std::max(F[k], lam.values[k - 1]), lam.values[k - 1] + cap);
    }

    if (!accepted) {
      if (window <= cfg.min_window_steps)
        raise(ErrorCode::WindowStalled, "iteration failed to settle at the minimum window size");
      window = std::max(cfg.min_window_steps, window / 2);
      ++report.window_halvings;
      continue;  // retry the same window, shorter
    }

    eval->commit(lam, k1);
    report.iterations_per_window.push_back(iters);
    report.evaluator_stats.window_residuals.push_back(residual);
    report.evaluator_stats.window_sizes.push_back(k1 - k0);
    report.evaluator_stats.max_ci_halfwidth =
        std::max(report.evaluator_stats.max_ci_halfwidth, eval->last_max_ci());
    report.residual = std::max(report.residual, residual);
    k0 = k1;
  }

  check_boundary_invariants(lam, "solve_regularized");
  report.boundary = std::move(lam);
  return report;
}

SolveReport solve_limit(const DensitySpec& f, const ModelParams& params, const TimeGrid& tgrid,
                        const mc::EnsembleConfig& cfg, double tol) {
  if (params.epsilon != 0.0)
    raise(ErrorCode::PreconditionFailed, "solve_limit is the epsilon = 0 problem");
  const ModelParams limit_params{params.alpha, 0.0};
  validate_model(f, limit_params);
  if (!(tol > 0.0)) raise(ErrorCode::PreconditionFailed, "solve_limit needs tol > 0");

  constexpr int kMaxSweeps = 200;
  SolveReport report;
  BoundaryPath lam = zero_boundary(tgrid);
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    BoundaryPath next = mc::evaluate_hitting_map(f, lam, limit_params, cfg);
    ++report.evaluator_stats.n_evaluations;
    double change = 0.0;
    for (int k = 0; k < tgrid.n_nodes(); ++k) {
      const double d = next.values[k] - lam.values[k];
      if (d < 0.0)
        raise(ErrorCode::PreconditionFailed,
              "monotone iteration regressed; the pathwise coupling is broken");
      change = std::max(change, d);
    }
    lam = std::move(next);
    if (change <= tol) {
      report.boundary = std::move(lam);
      report.iterations_per_window = {sweep};
      report.residual = change;
      // Bernoulli CI of the terminal hitting fraction, for context
      const double p_hat = 0.5 * params.alpha * report.boundary.values.back();
      const double n = static_cast<double>(cfg.n_particles);
      if (n > 1.5)
        report.evaluator_stats.max_ci_halfwidth =
            2.576 * (2.0 / params.alpha) * std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / n);
      return report;
    }
  }
  raise(ErrorCode::NotConverged, "monotone iteration did not settle within 200 sweeps");
}

}  // namespace stefan::fixedpoint
