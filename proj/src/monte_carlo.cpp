#include "stefan/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/errors.hpp"
#include "stefan/normal.hpp"
#include "stefan/parallel.hpp"
#include "stefan/philox.hpp"
#include "stefan/skorokhod.hpp"

namespace stefan::mc {
namespace {

void require_config(const EnsembleConfig& cfg) {
  if (cfg.n_particles < 1)
    raise(ErrorCode::PreconditionFailed, "ensemble needs n_particles >= 1");
}

void require_boundary(const BoundaryPath& lambda, const char* where) {
  if (static_cast<int>(lambda.values.size()) != lambda.grid.n_nodes())
    raise(ErrorCode::GridMismatch, std::string(where) + ": boundary length does not match its grid");
  if (lambda.values[0] != 0.0)
    raise(ErrorCode::PreconditionFailed, std::string(where) + ": boundary must start at 0");
}

inline std::int64_t draw_id(const EnsembleConfig& cfg, std::int64_t p) {
  return cfg.antithetic ? (p >> 1) : p;
}

inline bool negate_draws(const EnsembleConfig& cfg, std::int64_t p) {
  return cfg.antithetic && (p & 1);
}

// Walks one particle from node k0 to k1 under the given boundary values,
// updating (pos, runmin) in place and invoking body(k) after each node update
// for k = k0+1..k1.  The operation sequence per particle is fixed, so a walk
// split at any committed node is bitwise identical to an unsplit one.
template <bool Bridge, class Body>
inline void walk(const CounterRng& rng, std::int64_t id, bool negate, const double* lam, int k0,
                 int k1, double dt, double sqrt_dt, double& pos, double& runmin, Body&& body) {
  double y_prev = pos - lam[k0];
  for (int k = k0; k < k1; ++k) {
    auto d = rng.path_pair(id, static_cast<std::uint32_t>(k));
    double z = normal_quantile(d[0]);
    if (negate) z = -z;
    pos += z * sqrt_dt;
    double y_next = pos - lam[k + 1];
    if constexpr (Bridge) {
      runmin = std::min(runmin, skorokhod::bridge_minimum(y_prev, y_next, dt, d[1]));
    } else {
      runmin = std::min(runmin, y_next);
    }
    y_prev = y_next;
    body(k + 1);
  }
}

}  // namespace

bool bridge_active(const EnsembleConfig& cfg, double epsilon) {
  switch (cfg.bridge_refinement) {
    case EnsembleConfig::Bridge::on: return true;
    case EnsembleConfig::Bridge::off: return false;
    case EnsembleConfig::Bridge::automatic: return epsilon <= 0.1;
  }
  return false;
}

ParticleSystem::ParticleSystem(const DensitySpec& f, double epsilon, const TimeGrid& grid,
                               const EnsembleConfig& cfg)
    : grid_(grid), cfg_(cfg), epsilon_(epsilon), bridge_(bridge_active(cfg, epsilon)) {
  require_config(cfg_);
  const std::int64_t n = cfg_.n_particles;
  pos_.resize(static_cast<std::size_t>(n));
  runmin_.resize(static_cast<std::size_t>(n));
  if (cfg_.retain_uniforms) uniforms_.emplace(static_cast<std::size_t>(n));

  CounterRng rng(cfg_.seed);
  for_each_block(block_count(n), cfg_.n_threads, [&](int b) {
    auto [begin, end] = block_range(b, n);
    for (std::int64_t p = begin; p < end; ++p) {
      auto uv = rng.init_pair(draw_id(cfg_, p));
      double x0 = sample_coupled_initial(f, epsilon_, uv[0], uv[1]);
      pos_[static_cast<std::size_t>(p)] = x0;
      runmin_[static_cast<std::size_t>(p)] = x0;  // y(0) = x0 since Lam(0) = 0
      if (uniforms_) (*uniforms_)[static_cast<std::size_t>(p)] = uv;
    }
  });
}

void ParticleSystem::window_exp_sums(const BoundaryPath& lambda, int k1, double alpha,
                                     std::vector<double>& sum, std::vector<double>* sumsq) const {
  require_boundary(lambda, "window_exp_sums");
  require_same_grid(lambda.grid, grid_, "window_exp_sums");
  if (k1 < k0_ || k1 > grid_.n_steps)
    raise(ErrorCode::PreconditionFailed, "window_exp_sums: k1 out of range");
  const int k0 = k0_;
  const int len = k1 - k0 + 1;
  const std::int64_t n = cfg_.n_particles;
  const double rate = alpha / epsilon_;
  const double dt = grid_.dt, sqrt_dt = std::sqrt(dt);
  const double* lam = lambda.values.data();
  const CounterRng rng(cfg_.seed);

  const int nb = block_count(n);
  std::vector<std::vector<double>> partial_sum(static_cast<std::size_t>(nb));
  std::vector<std::vector<double>> partial_sq(static_cast<std::size_t>(sumsq ? nb : 0));

  for_each_block(nb, cfg_.n_threads, [&](int b) {
    auto [begin, end] = block_range(b, n);
    std::vector<double> s(static_cast<std::size_t>(len), 0.0);
    std::vector<double> sq(static_cast<std::size_t>(sumsq ? len : 0), 0.0);
    for (std::int64_t p = begin; p < end; ++p) {
      double pos = pos_[static_cast<std::size_t>(p)];
      double runmin = runmin_[static_cast<std::size_t>(p)];
      double cached_min = runmin;
      double term = std::exp(-rate * std::max(0.0, -runmin));
      s[0] += term;
      if (sumsq) sq[0] += term * term;
      auto body = [&](int k) {
        if (runmin != cached_min) {
          cached_min = runmin;
          term = std::exp(-rate * std::max(0.0, -runmin));
        }
        s[static_cast<std::size_t>(k - k0)] += term;
        if (sumsq) sq[static_cast<std::size_t>(k - k0)] += term * term;
      };
      if (bridge_)
        walk<true>(rng, draw_id(cfg_, p), negate_draws(cfg_, p), lam, k0, k1, dt, sqrt_dt, pos,
                   runmin, body);
      else
        walk<false>(rng, draw_id(cfg_, p), negate_draws(cfg_, p), lam, k0, k1, dt, sqrt_dt, pos,
                    runmin, body);
    }
    partial_sum[static_cast<std::size_t>(b)] = std::move(s);
    if (sumsq) partial_sq[static_cast<std::size_t>(b)] = std::move(sq);
  });

  sum.assign(static_cast<std::size_t>(len), 0.0);
  if (sumsq) sumsq->assign(static_cast<std::size_t>(len), 0.0);
  for (int b = 0; b < nb; ++b) {
    for (int k = 0; k < len; ++k) sum[static_cast<std::size_t>(k)] += partial_sum[b][k];
    if (sumsq)
      for (int k = 0; k < len; ++k) (*sumsq)[static_cast<std::size_t>(k)] += partial_sq[b][k];
  }
}

void ParticleSystem::commit(const BoundaryPath& lambda, int k1) {
  require_boundary(lambda, "commit");
  require_same_grid(lambda.grid, grid_, "commit");
  if (k1 < k0_ || k1 > grid_.n_steps)
    raise(ErrorCode::PreconditionFailed, "commit: k1 out of range");
  const int k0 = k0_;
  const std::int64_t n = cfg_.n_particles;
  const double dt = grid_.dt, sqrt_dt = std::sqrt(dt);
  const double* lam = lambda.values.data();
  const CounterRng rng(cfg_.seed);
  for_each_block(block_count(n), cfg_.n_threads, [&](int b) {
    auto [begin, end] = block_range(b, n);
    for (std::int64_t p = begin; p < end; ++p) {
      double pos = pos_[static_cast<std::size_t>(p)];
      double runmin = runmin_[static_cast<std::size_t>(p)];
      auto noop = [](int) {};
      if (bridge_)
        walk<true>(rng, draw_id(cfg_, p), negate_draws(cfg_, p), lam, k0, k1, dt, sqrt_dt, pos,
                   runmin, noop);
      else
        walk<false>(rng, draw_id(cfg_, p), negate_draws(cfg_, p), lam, k0, k1, dt, sqrt_dt, pos,
                    runmin, noop);
      pos_[static_cast<std::size_t>(p)] = pos;
      runmin_[static_cast<std::size_t>(p)] = runmin;
    }
  });
  k0_ = k1;
}

std::vector<double> ParticleSystem::local_time_row(std::int64_t particle,
                                                   const BoundaryPath& lambda, int k1) const {
  require_boundary(lambda, "local_time_row");
  require_same_grid(lambda.grid, grid_, "local_time_row");
  if (k0_ != 0)
    raise(ErrorCode::PreconditionFailed, "local_time_row: system already committed past 0");
  const double dt = grid_.dt, sqrt_dt = std::sqrt(dt);
  const double* lam = lambda.values.data();
  const CounterRng rng(cfg_.seed);
  double pos = pos_[static_cast<std::size_t>(particle)];
  double runmin = runmin_[static_cast<std::size_t>(particle)];
  std::vector<double> row(static_cast<std::size_t>(k1) + 1);
  row[0] = std::max(0.0, -runmin);
  auto body = [&](int k) { row[static_cast<std::size_t>(k)] = std::max(0.0, -runmin); };
  if (bridge_)
    walk<true>(rng, draw_id(cfg_, particle), negate_draws(cfg_, particle), lam, 0, k1, dt, sqrt_dt,
               pos, runmin, body);
  else
    walk<false>(rng, draw_id(cfg_, particle), negate_draws(cfg_, particle), lam, 0, k1, dt,
                sqrt_dt, pos, runmin, body);
  return row;
}

LocalTimeEnsemble::LocalTimeEnsemble(DensitySpec f, double epsilon, BoundaryPath lambda,
                                     EnsembleConfig cfg)
    : f_(std::move(f)), epsilon_(epsilon), lambda_(std::move(lambda)), cfg_(cfg) {}

const LocalTimeEnsemble::ExpMoments& LocalTimeEnsemble::exp_moments(double alpha) const {
  if (cache_ && cache_->alpha == alpha) return *cache_;
  ParticleSystem system(f_, epsilon_, lambda_.grid, cfg_);
  ExpMoments m;
  m.alpha = alpha;
  system.window_exp_sums(lambda_, lambda_.grid.n_steps, alpha, m.sum, &m.sumsq);
  cache_ = std::move(m);
  return *cache_;
}

std::vector<std::vector<double>> LocalTimeEnsemble::local_times(std::int64_t max_entries) const {
  const std::int64_t entries = cfg_.n_particles * lambda_.grid.n_nodes();
  if (entries > max_entries)
    raise(ErrorCode::PreconditionFailed,
          "local_times: matrix of " + std::to_string(entries) +
              " entries exceeds the materialization cap; use the streaming reductions");
  ParticleSystem system(f_, epsilon_, lambda_.grid, cfg_);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg_.n_particles));
  for (std::int64_t p = 0; p < cfg_.n_particles; ++p)
    rows[static_cast<std::size_t>(p)] = system.local_time_row(p, lambda_, lambda_.grid.n_steps);
  return rows;
}

std::optional<std::vector<std::array<double, 2>>> LocalTimeEnsemble::initial_uniforms() const {
  if (!cfg_.retain_uniforms) return std::nullopt;
  EnsembleConfig cfg = cfg_;
  ParticleSystem system(f_, epsilon_, lambda_.grid, cfg);
  return system.retained_uniforms();
}

LocalTimeEnsemble simulate_ensemble(const DensitySpec& f, double epsilon,
                                    const BoundaryPath& lambda, const EnsembleConfig& cfg) {
  require_config(cfg);
  require_boundary(lambda, "simulate_ensemble");
  if (!(epsilon > 0.0))
    raise(ErrorCode::NonPositiveEpsilon, "simulate_ensemble needs epsilon > 0");
  return LocalTimeEnsemble(f, epsilon, lambda, cfg);
}

BoundaryPath evaluate_F_mc(const LocalTimeEnsemble& ens, const ModelParams& params) {
  if (!(params.epsilon > 0.0))
    raise(ErrorCode::NonPositiveEpsilon, "evaluate_F_mc needs epsilon > 0");
  if (params.epsilon != ens.epsilon())
    raise(ErrorCode::PreconditionFailed,
          "evaluate_F_mc: params.epsilon differs from the ensemble's epsilon");
  const auto& m = ens.exp_moments(params.alpha);
  const double n = static_cast<double>(ens.config().n_particles);
  std::vector<double> values(m.sum.size());
  for (std::size_t k = 0; k < m.sum.size(); ++k)
    values[k] = (2.0 / params.alpha) * (1.0 - m.sum[k] / n);
  BoundaryPath out{ens.grid(), std::move(values), 0.0};
  out.lipschitz_bound = observed_lipschitz(out.grid, out.values);
  return out;
}

BoundaryPath evaluate_hitting_map(const DensitySpec& f, const BoundaryPath& lambda,
                                  const ModelParams& params, const EnsembleConfig& cfg) {
  require_config(cfg);
  require_boundary(lambda, "evaluate_hitting_map");
  if (params.epsilon != 0.0)
    raise(ErrorCode::PreconditionFailed, "evaluate_hitting_map is the epsilon = 0 problem");

  const TimeGrid& grid = lambda.grid;
  const std::int64_t n = cfg.n_particles;
  const int n_nodes = grid.n_nodes();
  const double dt = grid.dt, sqrt_dt = std::sqrt(dt);
  const double* lam = lambda.values.data();
  const CounterRng rng(cfg.seed);

  const int nb = block_count(n);
  std::vector<std::vector<std::uint32_t>> partial(static_cast<std::size_t>(nb));
  for_each_block(nb, cfg.n_threads, [&](int b) {
    auto [begin, end] = block_range(b, n);
    std::vector<std::uint32_t> hist(static_cast<std::size_t>(n_nodes), 0);
    for (std::int64_t p = begin; p < end; ++p) {
      auto uv = rng.init_pair(draw_id(cfg, p));
      double x0 = sample_coupled_initial(f, 0.0, uv[0], uv[1]);
      double y_prev = x0;  // Lam(0) = 0
      if (y_prev <= 0.0) {
        ++hist[0];
        continue;
      }
      double pos = x0;
      for (int k = 0; k < grid.n_steps; ++k) {
        auto d = rng.path_pair(draw_id(cfg, p), static_cast<std::uint32_t>(k));
        double z = normal_quantile(d[0]);
        if (negate_draws(cfg, p)) z = -z;
        pos += z * sqrt_dt;
        double y_next = pos - lam[k + 1];
        // first hit happens inside the step iff the bridge minimum dips to 0
        if (skorokhod::bridge_minimum(y_prev, y_next, dt, d[1]) <= 0.0) {
          ++hist[static_cast<std::size_t>(k) + 1];
          break;
        }
        y_prev = y_next;
      }
    }
    partial[static_cast<std::size_t>(b)] = std::move(hist);
  });

  std::vector<std::uint64_t> hits(static_cast<std::size_t>(n_nodes), 0);
  for (int b = 0; b < nb; ++b)
    for (int k = 0; k < n_nodes; ++k) hits[static_cast<std::size_t>(k)] += partial[b][k];
  std::uint64_t acc = 0;
  std::vector<double> values(static_cast<std::size_t>(n_nodes));
  for (int k = 0; k < n_nodes; ++k) {
    acc += hits[static_cast<std::size_t>(k)];
    values[static_cast<std::size_t>(k)] =
        (2.0 / params.alpha) * (static_cast<double>(acc) / static_cast<double>(n));
  }
  BoundaryPath out{grid, std::move(values), 0.0};
  out.lipschitz_bound = observed_lipschitz(grid, out.values);
  return out;
}

double ci_halfwidth(const LocalTimeEnsemble& ens, const ModelParams& params, double t) {
  const auto& m = ens.exp_moments(params.alpha);
  const int k = ens.grid().node_index(t);
  const double n = static_cast<double>(ens.config().n_particles);
  if (n < 2) return 0.0;
  double s = m.sum[static_cast<std::size_t>(k)];
  double sq = m.sumsq[static_cast<std::size_t>(k)];
  double var = std::max(0.0, (sq - s * s / n) / (n - 1.0));
  return 2.576 * (2.0 / params.alpha) * std::sqrt(var / n);
}

}  // namespace stefan::mc
