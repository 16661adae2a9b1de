#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "stefan/boundary.hpp"
#include "stefan/density.hpp"
#include "stefan/grids.hpp"
#include "stefan/model.hpp"

namespace stefan::mc {

struct EnsembleConfig {
  std::int64_t n_particles = 1;
  std::uint64_t seed = 0;
  // Bridge refinement replaces the plain grid minimum with the conditional
  // in-step Brownian-bridge minimum, removing the O(sqrt(dt)) minimum bias
  // that the 1/eps exponent amplifies.  automatic = on iff eps <= 0.1.
  enum class Bridge { automatic, on, off };
  Bridge bridge_refinement = Bridge::automatic;
  bool antithetic = false;        // pair 2i/2i+1 shares draws, negated Gaussians
  bool retain_uniforms = false;   // keep per-particle (u, v) for inspection
  int n_threads = 0;              // 0 = hardware concurrency
};

bool bridge_active(const EnsembleConfig& cfg, double epsilon);

// Particle states frozen at a time index k0: position sum x0 + B(t_k0) and the
// running minimum of the (refined) drifted path up to t_k0.  Because draws are
// counter-indexed, evaluating a window [k0, k1] under a candidate boundary is
// bitwise identical to the corresponding segment of a full-path simulation;
// the fixed-point loop relies on this to avoid re-simulating frozen prefixes.
//
// All reductions are per-block partials merged in block order, so results do
// not depend on the worker count.
class ParticleSystem {
 public:
  ParticleSystem(const DensitySpec& f, double epsilon, const TimeGrid& grid,
                 const EnsembleConfig& cfg);

  const TimeGrid& grid() const { return grid_; }
  const EnsembleConfig& config() const { return cfg_; }
  double epsilon() const { return epsilon_; }
  int frozen_step() const { return k0_; }

  // Sums (and optionally sums of squares) over particles of
  // exp(-alpha * l_k / epsilon) for nodes k = k0..k1, given boundary values
  // that agree with the committed prefix on [0, k0].  Output length k1-k0+1.
  void window_exp_sums(const BoundaryPath& lambda, int k1, double alpha,
                       std::vector<double>& sum, std::vector<double>* sumsq) const;

  // Advances the frozen prefix to k1 under the accepted boundary.
  void commit(const BoundaryPath& lambda, int k1);

  // Local-time trajectory of one particle on [0, k1] (diagnostic/test path).
  std::vector<double> local_time_row(std::int64_t particle, const BoundaryPath& lambda,
                                     int k1) const;

  const std::optional<std::vector<std::array<double, 2>>>& retained_uniforms() const {
    return uniforms_;
  }

 private:
  TimeGrid grid_;
  EnsembleConfig cfg_;
  double epsilon_;
  bool bridge_;
  int k0_ = 0;
  std::vector<double> pos_;     // x0 + B(t_k0) per particle
  std::vector<double> runmin_;  // running (refined) minimum up to t_k0
  std::optional<std::vector<std::array<double, 2>>> uniforms_;
};

// Per-particle local-time trajectories, evaluated lazily: the ensemble stores
// its inputs and streams reductions from the counter RNG on demand instead of
// materializing the particle-by-time matrix (which is ~6.5 GB at acceptance
// scale).  Identical inputs give bitwise identical results for any worker
// count; rows can be re-simulated exactly.
class LocalTimeEnsemble {
 public:
  LocalTimeEnsemble(DensitySpec f, double epsilon, BoundaryPath lambda, EnsembleConfig cfg);

  const TimeGrid& grid() const { return lambda_.grid; }
  const EnsembleConfig& config() const { return cfg_; }
  const BoundaryPath& boundary() const { return lambda_; }
  const DensitySpec& density() const { return f_; }
  double epsilon() const { return epsilon_; }

  struct ExpMoments {
    double alpha = 0.0;
    std::vector<double> sum;    // per node: sum over particles of exp(-alpha l / eps)
    std::vector<double> sumsq;  // per node: sum of squares of the same terms
  };
  // One streaming pass per distinct alpha; cached thereafter.
  const ExpMoments& exp_moments(double alpha) const;

  // Full [particle][node] matrix of regulator values; refuses to build more
  // than max_entries values.  Intended for unit-scale inspection.
  std::vector<std::vector<double>> local_times(std::int64_t max_entries = std::int64_t(1) << 24) const;

  std::optional<std::vector<std::array<double, 2>>> initial_uniforms() const;

 private:
  DensitySpec f_;
  double epsilon_;
  BoundaryPath lambda_;
  EnsembleConfig cfg_;
  mutable std::optional<ExpMoments> cache_;
};

// Validates inputs and binds them into a lazily evaluated ensemble.
LocalTimeEnsemble simulate_ensemble(const DensitySpec& f, double epsilon,
                                    const BoundaryPath& lambda, const EnsembleConfig& cfg);

// F(t_k) = (2/alpha) (1 - mean_p exp(-alpha l_{t_k} / eps)); non-decreasing,
// values in [0, 2/alpha).  params.epsilon must equal the ensemble's epsilon.
BoundaryPath evaluate_F_mc(const LocalTimeEnsemble& ens, const ModelParams& params);

// Limit-problem map: t_k -> (2/alpha) P(first hit of 0 by t_k) for particles
// x0 + B - Lam with x0 drawn from the unmollified f.  Always bridge-refined;
// per-particle first-hit histogram (integer-exact reduction).
// Requires params.epsilon == 0.
BoundaryPath evaluate_hitting_map(const DensitySpec& f, const BoundaryPath& lambda,
                                  const ModelParams& params, const EnsembleConfig& cfg);

// 99% normal-approximation half-width of the F_mc estimator at an on-grid t:
// 2.576 * (2/alpha) * sd(exp(-alpha l_t / eps)) / sqrt(n).
double ci_halfwidth(const LocalTimeEnsemble& ens, const ModelParams& params, double t);

// Below this width the alpha/eps exponent makes the estimator variance
// explode; runs are flagged as unreliable rather than silently trusted.
inline constexpr double kEpsilonReliabilityFloor = 0.02;
inline bool mc_reliable(double epsilon) { return epsilon >= kEpsilonReliabilityFloor; }

}  // namespace stefan::mc
