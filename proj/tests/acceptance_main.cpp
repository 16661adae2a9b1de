// End-to-end acceptance gate for the freezing-front solver suite.  Each
// numbered criterion exercises the shipped code at reference scale
// (t_max = 1 with dt = 2^-12, x_max = 8 with dx = 2^-10, 2e5 particles,
// fixed-point tolerance 1e-4) and prints one [PASS]/[FAIL] line; the process
// exits nonzero if any criterion fails.  Expect ~20 minutes on one core.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stefan/boundary.hpp"
#include "stefan/density.hpp"
#include "stefan/experiments.hpp"
#include "stefan/fixed_point.hpp"
#include "stefan/grids.hpp"
#include "stefan/model.hpp"
#include "stefan/mollify.hpp"
#include "stefan/monte_carlo.hpp"
#include "stefan/normal.hpp"
#include "stefan/philox.hpp"
#include "stefan/robin_pde.hpp"
#include "stefan/skorokhod.hpp"

#include "oracle_constants.hpp"

using namespace stefan;
using Clock = std::chrono::steady_clock;

namespace {

// Collects sub-check failures within one criterion; a criterion passes iff
// every expect() held.
class SubChecks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ++failures_;
      std::printf("      FAILED: %s\n", what.c_str());
      std::fflush(stdout);
    }
  }
  bool ok() const { return failures_ == 0; }

 private:
  int failures_ = 0;
};

constexpr double kAlpha = 3.0;
constexpr std::uint64_t kSweepSeed = 20240817;

DensitySpec reference_density() { return DensitySpec::uniform(0.0, 1.0); }
TimeGrid reference_tgrid() { return TimeGrid(1.0, 4096); }
SpaceGrid reference_xgrid() { return SpaceGrid(8.0, 8192); }

mc::EnsembleConfig reference_ensemble() {
  mc::EnsembleConfig cfg;
  cfg.n_particles = 200000;
  cfg.seed = kSweepSeed;
  // One shared stream across every width: the ordering audits below rely on
  // pathwise coupling, which needs the same draws AND the same in-step
  // minimum refinement at every width, so the bridge is pinned on instead of
  // left on the width-triggered automatic rule.
  cfg.bridge_refinement = mc::EnsembleConfig::Bridge::on;
  cfg.n_threads = 1;
  return cfg;
}

fixedpoint::PicardConfig reference_mc_picard() {
  fixedpoint::PicardConfig cfg;
  cfg.evaluator = fixedpoint::Evaluator::mc;
  cfg.tol = 1e-4;
  cfg.ensemble = reference_ensemble();
  return cfg;
}

// ---------------------------------------------------------------------------
// 1. Reflection map: worked examples bitwise, the comparison property on 1e4
//    dominated pairs, all in under a second.

bool criterion_reflection() {
  SubChecks c;
  const auto t0 = Clock::now();

  auto reg = [](std::vector<double> v) {
    TimeGrid g(1.0, static_cast<int>(v.size()) - 1);
    return skorokhod::regulator({g, std::move(v)}).values;
  };
  c.expect(reg({0.0, 1.0, 2.0, 3.0}) == std::vector<double>({0.0, 0.0, 0.0, 0.0}),
           "a rising path must accumulate no pushing");
  c.expect(reg({1.0, 0.5, 0.0, -0.5, -1.0}) == std::vector<double>({0.0, 0.0, 0.0, 0.5, 1.0}),
           "a ramp through zero must push linearly");
  c.expect(reg({1.0, -1.0, 0.0, -2.0}) == std::vector<double>({0.0, 1.0, 1.0, 2.0}),
           "the regulator must track the running minimum");

  // a pointwise-lower driving path never pushes less (comparison property)
  const TimeGrid g(1.0, 64);
  const double sdt = std::sqrt(g.dt);
  CounterRng rng(818);
  int violations = 0;
  for (int pair = 0; pair < 10000; ++pair) {
    std::vector<double> hi(static_cast<std::size_t>(g.n_nodes()));
    std::vector<double> lo(hi.size());
    double y = 0.0;
    hi[0] = lo[0] = 0.0;
    for (int k = 1; k < g.n_nodes(); ++k) {
      const auto u = rng.path_pair(pair, k);
      y += normal_quantile(u[0]) * sdt;
      hi[static_cast<std::size_t>(k)] = y;
      lo[static_cast<std::size_t>(k)] = y - 2.0 * u[1];
    }
    const auto lh = skorokhod::regulator({g, hi}).values;
    const auto ll = skorokhod::regulator({g, lo}).values;
    for (int k = 0; k < g.n_nodes(); ++k)
      if (lh[static_cast<std::size_t>(k)] > ll[static_cast<std::size_t>(k)]) {
        ++violations;
        break;
      }
  }
  c.expect(violations == 0,
           std::to_string(violations) + " of 10000 dominated pairs had regulators out of order");

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("      10000 dominated pairs in order, %.3f s\n", secs);
  c.expect(secs < 1.0, "reflection checks must finish in under one second");
  return c.ok();
}

// ---------------------------------------------------------------------------
// 2. The grid and particle evaluations of the boundary map agree at a frozen
//    boundary, within three times (99% CI half-width + one-step refinement
//    scheme-error estimate).

bool criterion_evaluator_agreement() {
  SubChecks c;
  for (const double eps : {0.5, 0.25}) {
    mc::EnsembleConfig cfg = reference_ensemble();
    cfg.seed = 91;
    const auto rep = experiments::fk_cross_validate(
        reference_density(), ModelParams{kAlpha, eps}, zero_boundary(reference_tgrid()),
        reference_xgrid(), cfg);
    std::printf("      width %.2f: gap %.3e vs 3*(ci %.3e + scheme %.3e)\n", eps, rep.gap,
                rep.max_ci, rep.scheme_error_estimate);
    std::fflush(stdout);
    c.expect(rep.pass,
             "evaluator gap exceeds its error budget at width " + std::to_string(eps));
  }
  return c.ok();
}

// ---------------------------------------------------------------------------
// 3. Discrete maximum principle: over 50 randomized admissible inputs the
//    field stays inside [-1e-12, sup f_eps + 1e-10] at every computed node.

bool criterion_max_principle() {
  SubChecks c;
  std::mt19937_64 gen(401);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_min = 0.0;
  double worst_over = -1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double alpha = 2.6 + 1.4 * unif(gen);
    const double a = 0.4 * unif(gen);
    const double w_u = 0.9 + 1.1 * unif(gen);
    const double w_p = 1.2 + 0.8 * unif(gen);
    const double r = 0.35 + 0.3 * unif(gen);
    const DensitySpec f =
        (trial % 2 == 0)
            ? DensitySpec::uniform(a, a + w_u)
            : DensitySpec::piecewise_constant({a, a + 0.5 * w_p, a + w_p},
                                              {2.0 * r / w_p, 2.0 * (1.0 - r) / w_p});
    const double eps = 0.2 + 0.6 * unif(gen);
    const ModelParams params{alpha, eps};
    validate_model(f, params);  // every generated input must be admissible

    const MollifiedDensity f_eps = mollify(f, eps);
    const TimeGrid tg(1.0, 128);
    const SpaceGrid xg(f_eps.support_upper() + 2.0, 256);
    const double rate = 0.9 * unif(gen) * f_eps.sup_norm() / eps;
    std::vector<double> raw(static_cast<std::size_t>(tg.n_nodes()), 0.0);
    for (std::size_t k = 1; k < raw.size(); ++k)
      raw[k] = raw[k - 1] + unif(gen) * rate * tg.dt;
    const BoundaryPath lam = clamped_boundary(tg, raw, rate);

    const pde::DensityField field = pde::solve_robin_pde(f_eps, lam, params, xg);
    worst_min = std::min(worst_min, field.min_value);
    worst_over = std::max(worst_over, field.max_value - f_eps.sup_norm());
    c.expect(field.min_value >= -1e-12 && field.max_value <= f_eps.sup_norm() + 1e-10,
             "field escaped [0, sup] on randomized input " + std::to_string(trial));
  }
  std::printf("      50 inputs: min undershoot %.1e, max overshoot %.1e\n", worst_min, worst_over);
  return c.ok();
}

// ---------------------------------------------------------------------------
// 4. Mass ledger: PDE mass plus accumulated boundary flux equals the initial
//    mass within 1e-3 at reference scale, and the residual shrinks when both
//    grid spacings are halved.

double mass_residual_at(const ModelParams& params, const TimeGrid& tg, const SpaceGrid& xg) {
  fixedpoint::PicardConfig cfg;
  cfg.evaluator = fixedpoint::Evaluator::pde;
  cfg.tol = 1e-4;
  cfg.xgrid = xg;
  const auto solved = fixedpoint::solve_regularized(reference_density(), params, tg, cfg);
  const MollifiedDensity f_eps = mollify(reference_density(), params.epsilon);
  pde::SolveOptions opts;
  opts.store = pde::SolveOptions::Store::off;
  const pde::DensityField field = pde::solve_robin_pde(f_eps, solved.boundary, params, xg, opts);
  const BoundaryPath F = pde::evaluate_F_pde(field, params);
  const std::vector<double> r = pde::mass_identity_residual(field, F, params);
  return *std::max_element(r.begin(), r.end());
}

bool criterion_mass_ledger() {
  SubChecks c;
  const ModelParams params{kAlpha, 0.5};
  const double coarse = mass_residual_at(params, reference_tgrid(), reference_xgrid());
  const double fine = mass_residual_at(params, TimeGrid(1.0, 8192), SpaceGrid(8.0, 16384));
  std::printf("      max residual %.3e at reference, %.3e with dt, dx halved\n", coarse, fine);
  c.expect(coarse <= 1e-3, "mass ledger residual above 1e-3 at reference scale");
  c.expect(fine < coarse, "mass ledger residual failed to shrink under refinement");
  return c.ok();
}

// ---------------------------------------------------------------------------
// Criteria 5-7 share one shrinking-width sweep at reference scale.

experiments::SweepReport run_reference_sweep() {
  experiments::SweepOptions opts;
  opts.limit_tol = 5e-4;
  opts.limit_particles = 500000;
  opts.with_fk_gaps = false;  // evaluator agreement is criterion 2's job
  return experiments::epsilon_sweep(reference_density(), kAlpha, {0.8, 0.4, 0.2, 0.1, 0.05},
                                    reference_tgrid(), reference_mc_picard(),
                                    reference_ensemble(), opts);
}

// 5. Fixed-point residual <= 1e-4 at widths 0.8 / 0.4 / 0.2 for both
//    evaluators, and a different worker count reproduces the solved boundary
//    bit for bit.

bool criterion_solver_residual(const experiments::SweepReport& sweep) {
  SubChecks c;
  for (int j = 0; j < 3; ++j) {
    const double res = sweep.solver_reports[static_cast<std::size_t>(j)].residual;
    std::printf("      width %.2f: particle-evaluator residual %.3e\n",
                sweep.epsilons[static_cast<std::size_t>(j)], res);
    c.expect(res <= 1e-4, "particle-evaluator residual above 1e-4 at width " +
                              std::to_string(sweep.epsilons[static_cast<std::size_t>(j)]));
  }
  for (const double eps : {0.8, 0.4, 0.2}) {
    fixedpoint::PicardConfig cfg;
    cfg.evaluator = fixedpoint::Evaluator::pde;
    cfg.tol = 1e-4;
    cfg.xgrid = reference_xgrid();
    const auto rep = fixedpoint::solve_regularized(reference_density(), ModelParams{kAlpha, eps},
                                                   reference_tgrid(), cfg);
    std::printf("      width %.2f: grid-evaluator residual %.3e\n", eps, rep.residual);
    c.expect(rep.residual <= 1e-4,
             "grid-evaluator residual above 1e-4 at width " + std::to_string(eps));
  }

  // worker count must not change a single bit of the solved boundary
  fixedpoint::PicardConfig cfg = reference_mc_picard();
  cfg.ensemble.n_threads = 3;
  const auto rerun = fixedpoint::solve_regularized(reference_density(), ModelParams{kAlpha, 0.4},
                                                   reference_tgrid(), cfg);
  c.expect(rerun.boundary.values == sweep.boundaries[1].values,
           "three workers solved a different boundary than one worker at width 0.4");
  return c.ok();
}

// 6. Ordering in the width: along the shared-seed sweep, no pointwise
//    ordering violation exceeds tol_mono = 2 * (tol + max CI half-width).

bool criterion_monotone(const experiments::SweepReport& sweep) {
  SubChecks c;
  std::printf("      tol_mono %.3e, violations recorded: %zu\n", sweep.tol_mono,
              sweep.monotonicity_violations.size());
  for (std::size_t i = 0; i < sweep.monotonicity_violations.size() && i < 5; ++i) {
    const auto& v = sweep.monotonicity_violations[i];
    std::printf("      violation: widths %.2f -> %.2f at t %.4f, magnitude %.3e\n", v.eps_coarse,
                v.eps_fine, v.t, v.magnitude);
  }
  c.expect(sweep.monotonicity_violations.empty(),
           "shrinking the width must not lower the boundary beyond tol_mono");
  return c.ok();
}

// 7. Convergence to the sharp-interface boundary: sup distances along the
//    sweep are non-increasing within tol_mono, and the smallest-width
//    distance is at most half the largest-width distance.

bool criterion_limit_convergence(const experiments::SweepReport& sweep) {
  SubChecks c;
  const auto& d = sweep.sup_distances;
  for (std::size_t j = 0; j < d.size(); ++j)
    std::printf("      width %.2f: sup distance to the sharp-interface boundary %.4f\n",
                sweep.epsilons[j], d[j]);
  std::printf("      sharp-interface terminal value %.4f (%d sweeps)\n",
              sweep.limit.values.back(), sweep.limit_report.iterations_per_window[0]);
  for (std::size_t j = 0; j + 1 < d.size(); ++j)
    c.expect(d[j + 1] <= d[j] + sweep.tol_mono,
             "distance grew between widths " + std::to_string(sweep.epsilons[j]) + " and " +
                 std::to_string(sweep.epsilons[j + 1]));
  c.expect(d.back() <= 0.5 * d.front(),
           "smallest-width distance above half the largest-width distance");
  return c.ok();
}

// ---------------------------------------------------------------------------
// 8. Sharp-interface first sweep against closed-form quadrature values at
//    t = 0.25 / 0.5 / 1 (within 3 standard errors), plus the far-support
//    scenario where the boundary must stay at zero.

bool criterion_first_sweep_oracles() {
  SubChecks c;
  mc::EnsembleConfig cfg = reference_ensemble();
  cfg.n_particles = 500000;
  cfg.seed = 4711;
  const BoundaryPath first = mc::evaluate_hitting_map(
      reference_density(), zero_boundary(reference_tgrid()), ModelParams{kAlpha, 0.0}, cfg);
  const struct {
    int k;
    double pin;
  } rows[] = {{1024, oracle::kLimitFirstSweep025},
              {2048, oracle::kLimitFirstSweep05},
              {4096, oracle::kLimitFirstSweep1}};
  for (const auto& row : rows) {
    const double p = 0.5 * kAlpha * row.pin;  // hit probability behind the scaled value
    const double se = (2.0 / kAlpha) * std::sqrt(p * (1.0 - p) / 500000.0);
    const double got = first.values[static_cast<std::size_t>(row.k)];
    const double dev = std::abs(got - row.pin);
    std::printf("      t %.2f: %.6f vs %.6f (dev %.2e, 3 se %.2e)\n",
                reference_tgrid().t(row.k), got, row.pin, dev, 3.0 * se);
    c.expect(dev <= 3.0 * se, "first sweep off its quadrature value at t = " +
                                  std::to_string(reference_tgrid().t(row.k)));
  }

  mc::EnsembleConfig far_cfg = cfg;
  far_cfg.n_particles = 100000;
  const auto far = fixedpoint::solve_limit(DensitySpec::uniform(6.0, 7.0),
                                           ModelParams{kAlpha, 0.0}, reference_tgrid(), far_cfg,
                                           5e-4);
  std::printf("      far-support terminal value %.2e\n", far.boundary.values.back());
  c.expect(far.boundary.values.back() <= 1e-6,
           "far-support sharp-interface boundary must stay at zero");
  return c.ok();
}

// ---------------------------------------------------------------------------
// 9. Validation gate, end to end through the installed binary: a hypercooled
//    profile (sup f >= alpha/2) is refused at exit code 1 with the condition
//    named on stderr.

bool criterion_rejection_gate() {
  SubChecks c;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "stefan_acceptance_gate";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "hot.json";
  {
    std::ofstream out(cfg);
    out << "{\n"
           "  \"mode\": \"solve_regularized\",\n"
           "  \"model\": {\"alpha\": 3.0, \"density\": {\"kind\": \"uniform\", \"a\": 0.0, "
           "\"b\": 0.5}},\n"
           "  \"epsilon\": 0.5,\n"
           "  \"time_grid\": {\"t_max\": 1.0, \"n_steps\": 16},\n"
           "  \"output_dir\": \""
        << (dir / "out").string()
        << "\"\n"
           "}\n";
  }
  const fs::path errfile = dir / "stderr.txt";
  const std::string cmd = std::string(STEFAN_CLI_PATH) + " --config " + cfg.string() +
                          " >/dev/null 2>" + errfile.string();
  const int wait_status = std::system(cmd.c_str());
  const int exit_code = WIFEXITED(wait_status) ? WEXITSTATUS(wait_status) : -1;
  std::ifstream err(errfile);
  std::stringstream ss;
  ss << err.rdbuf();
  const std::string text = ss.str();
  std::printf("      exit %d, stderr: %s", exit_code, text.c_str());
  c.expect(exit_code == 1, "hypercooled input must exit with status 1, got " +
                               std::to_string(exit_code));
  c.expect(text.find("SupercriticalSupNorm") != std::string::npos,
           "the diagnostic must name the failed admissibility condition");
  fs::remove_all(dir);
  return c.ok();
}

}  // namespace

int main() {
  std::printf("freezing-front solver suite: acceptance gate\n");
  std::printf("reference scale: dt 2^-12, dx 2^-10, 2e5 particles, tol 1e-4\n\n");
  int failed = 0;

  const auto gate = [&failed](int idx, const char* name, auto&& body) {
    std::printf("-- %d: %s\n", idx, name);
    std::fflush(stdout);
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = body();
    } catch (const std::exception& e) {
      std::printf("      FAILED: unexpected error: %s\n", e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] %d: %s (%.1f s)\n\n", ok ? "PASS" : "FAIL", idx, name, secs);
    std::fflush(stdout);
    if (!ok) ++failed;
  };

  gate(1, "reflection map: worked examples, comparison property, speed", criterion_reflection);
  gate(2, "grid and particle evaluators agree at a frozen boundary",
       criterion_evaluator_agreement);
  gate(3, "discrete maximum principle on randomized admissible inputs", criterion_max_principle);
  gate(4, "mass ledger closes and tightens under refinement", criterion_mass_ledger);

  std::printf("-- shared sweep: widths (0.8, 0.4, 0.2, 0.1, 0.05) + sharp-interface solve\n");
  std::fflush(stdout);
  std::optional<experiments::SweepReport> sweep;
  std::string sweep_error = "shared sweep unavailable";
  {
    const auto t0 = Clock::now();
    try {
      sweep = run_reference_sweep();
    } catch (const std::exception& e) {
      sweep_error = std::string("shared sweep failed: ") + e.what();
    }
    std::printf("   done (%.1f s)\n\n", std::chrono::duration<double>(Clock::now() - t0).count());
    std::fflush(stdout);
  }

  gate(5, "fixed-point residual and worker-count reproducibility", [&] {
    if (!sweep) {
      std::printf("      FAILED: %s\n", sweep_error.c_str());
      return false;
    }
    return criterion_solver_residual(*sweep);
  });
  gate(6, "boundary ordering along the shrinking-width sweep", [&] {
    if (!sweep) {
      std::printf("      FAILED: %s\n", sweep_error.c_str());
      return false;
    }
    return criterion_monotone(*sweep);
  });
  gate(7, "distances to the sharp-interface boundary shrink", [&] {
    if (!sweep) {
      std::printf("      FAILED: %s\n", sweep_error.c_str());
      return false;
    }
    return criterion_limit_convergence(*sweep);
  });

  gate(8, "sharp-interface first sweep matches quadrature values", criterion_first_sweep_oracles);
  gate(9, "hypercooled input refused with the named diagnostic", criterion_rejection_gate);

  if (failed == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d of 9 criteria FAILED\n", failed);
  return 1;
}
