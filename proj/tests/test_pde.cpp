#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracle_constants.hpp"
#include "stefan/boundary.hpp"
#include "stefan/density.hpp"
#include "stefan/errors.hpp"
#include "stefan/mollify.hpp"
#include "stefan/robin_pde.hpp"

using namespace stefan;
using pde::DensityField;
using pde::SolveOptions;

namespace {

BoundaryPath linear_boundary(const TimeGrid& g, double rate) {
  std::vector<double> v(static_cast<std::size_t>(g.n_nodes()));
  for (int k = 0; k < g.n_nodes(); ++k) v[static_cast<std::size_t>(k)] = rate * g.t(k);
  return boundary_from_values(g, std::move(v), rate);
}

struct PinScenario {
  MollifiedDensity f_eps;
  ModelParams params;
  TimeGrid tgrid;
  SpaceGrid xgrid;
};

PinScenario pin_scenario() {
  return {mollify(DensitySpec::uniform(0.0, 1.0), 0.5), ModelParams{3.0, 0.5}, TimeGrid(1.0, 64),
          SpaceGrid(4.0, 128)};
}

}  // namespace

TEST_CASE("reference solve reproduces the frozen field values") {
  auto s = pin_scenario();
  auto lam = linear_boundary(s.tgrid, 0.3);
  SolveOptions opts;
  opts.store = SolveOptions::Store::on;
  auto field = pde::solve_robin_pde(s.f_eps, lam, s.params, s.xgrid, opts);

  CHECK(field.boundary_trace[16] == doctest::Approx(oracle::kPinDriftTrace16).epsilon(1e-8));
  CHECK(field.boundary_trace[32] == doctest::Approx(oracle::kPinDriftTrace32).epsilon(1e-8));
  CHECK(field.boundary_trace[64] == doctest::Approx(oracle::kPinDriftTrace64).epsilon(1e-8));
  REQUIRE(field.values.has_value());
  CHECK(field.at(64, 16) == doctest::Approx(oracle::kPinDriftMid).epsilon(1e-8));  // x = 0.5
  CHECK(field.mass[64] == doctest::Approx(oracle::kPinDriftMass64).epsilon(1e-8));

  auto F = pde::evaluate_F_pde(field, s.params);
  CHECK(F.values[64] == doctest::Approx(oracle::kPinDriftF64).epsilon(1e-8));

  auto resid = pde::mass_identity_residual(field, F, s.params);
  double maxr = *std::max_element(resid.begin(), resid.end());
  CHECK(maxr == doctest::Approx(oracle::kPinDriftMaxResid).epsilon(1e-6));
}

TEST_CASE("zero-boundary solve reproduces its frozen values") {
  auto s = pin_scenario();
  auto field = pde::solve_robin_pde(s.f_eps, zero_boundary(s.tgrid), s.params, s.xgrid);
  CHECK(field.boundary_trace[64] == doctest::Approx(oracle::kPinZeroTrace64).epsilon(1e-8));
  auto F = pde::evaluate_F_pde(field, s.params);
  CHECK(F.values[64] == doctest::Approx(oracle::kPinZeroF64).epsilon(1e-8));
  auto resid = pde::mass_identity_residual(field, F, s.params);
  CHECK(*std::max_element(resid.begin(), resid.end()) ==
        doctest::Approx(oracle::kPinZeroMaxResid).epsilon(1e-6));
}

TEST_CASE("discrete maximum principle holds on randomized admissible inputs") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    double a = 0.3 + 1.2 * unif(gen);
    double b = a + 0.4 + unif(gen);
    double eps = 0.15 + 0.6 * unif(gen);
    auto f = DensitySpec::uniform(a, b);
    double alpha = 2.5 * f.sup_norm() + 0.5 * unif(gen);
    auto f_eps = mollify(f, eps);
    TimeGrid tg(0.5 + unif(gen), 40 + static_cast<int>(40 * unif(gen)));
    SpaceGrid xg(b + eps + 4.0, 96);

    // admissible random boundary: non-decreasing, inside the solver's slope cap
    // sup|f_eps|/eps (which also keeps the Robin coefficient nonnegative, since
    // alpha > 2 sup|f_eps| for subcritical inputs)
    double max_rate = 0.9 * f_eps.sup_norm() / eps;
    std::vector<double> v(static_cast<std::size_t>(tg.n_nodes()), 0.0);
    for (int k = 1; k < tg.n_nodes(); ++k)
      v[static_cast<std::size_t>(k)] =
          v[static_cast<std::size_t>(k - 1)] + max_rate * unif(gen) * tg.dt;
    auto lam = boundary_from_values(tg, std::move(v), max_rate);

    auto field = pde::solve_robin_pde(f_eps, lam, ModelParams{alpha, eps}, xg);
    CHECK(field.min_value >= 0.0);  // Thomas back-substitution combines nonnegatives
    CHECK(field.max_value <= field.f_sup * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("zero-flux wall conserves mass to rounding") {
  auto f_eps = mollify(DensitySpec::uniform(0.0, 1.0), 0.5);
  // x_max = 8: the Gaussian tail never reaches the wall, so the only mass
  // drift a zero-flux run can show is scheme roundoff
  SpaceGrid xg(8.0, 512);
  TimeGrid tg(1.0, 64);
  SolveOptions opts;
  opts.zero_robin = true;
  auto field = pde::solve_robin_pde(f_eps, zero_boundary(tg), ModelParams{3.0, 0.5}, xg, opts);
  for (double m : field.mass) CHECK(std::abs(m - field.mass.front()) <= 1e-10);
  CHECK(field.mass.front() == doctest::Approx(1.0).epsilon(1e-3));  // quadrature of f_eps
}

TEST_CASE("transform of the trace is non-decreasing and slope-capped") {
  auto s = pin_scenario();
  auto lam = linear_boundary(s.tgrid, 0.3);
  auto field = pde::solve_robin_pde(s.f_eps, lam, s.params, s.xgrid);
  auto F = pde::evaluate_F_pde(field, s.params);

  CHECK(F.values.front() == 0.0);
  for (std::size_t k = 1; k < F.values.size(); ++k) CHECK(F.values[k] >= F.values[k - 1]);
  CHECK(F.lipschitz_bound == doctest::Approx(field.f_sup / 0.5).epsilon(1e-12));
  CHECK_NOTHROW(check_boundary_invariants(F, "test"));
  double obs = observed_lipschitz(s.tgrid, F.values);
  CHECK(obs <= F.lipschitz_bound * (1.0 + 1e-9));
}

TEST_CASE("mass identity tightens as the grid is refined") {
  auto f = DensitySpec::uniform(0.0, 1.0);
  auto f_eps = mollify(f, 0.5);
  ModelParams params{3.0, 0.5};

  auto residual_at = [&](int n_steps, int n_cells) {
    TimeGrid tg(1.0, n_steps);
    SpaceGrid xg(8.0, n_cells);
    auto field = pde::solve_robin_pde(f_eps, linear_boundary(tg, 0.25), params, xg);
    auto F = pde::evaluate_F_pde(field, params);
    auto r = pde::mass_identity_residual(field, F, params);
    return *std::max_element(r.begin(), r.end());
  };

  double coarse = residual_at(1024, 1024);
  double fine = residual_at(2048, 2048);
  CHECK(coarse <= 1e-3);
  CHECK(fine < coarse);
}

TEST_CASE("advancing in windows is bitwise identical to one sweep") {
  auto s = pin_scenario();
  auto lam = linear_boundary(s.tgrid, 0.3);
  pde::RobinStepper stepper(s.f_eps, s.params, s.tgrid, s.xgrid);

  auto p_full = stepper.initial_state();
  std::vector<std::vector<double>> full_nodes;
  stepper.advance(p_full, 0, 64, lam.values.data(),
                  [&](int, const std::vector<double>& p) { full_nodes.push_back(p); });

  auto p_split = stepper.initial_state();
  stepper.advance(p_split, 0, 17, lam.values.data());
  CHECK(p_split == full_nodes[16]);
  stepper.advance(p_split, 17, 40, lam.values.data());
  CHECK(p_split == full_nodes[39]);
  stepper.advance(p_split, 40, 64, lam.values.data());
  CHECK(p_split == p_full);
}

TEST_CASE("inadmissible inputs are rejected with the specific code") {
  auto f = DensitySpec::uniform(0.0, 1.0);
  auto f_eps = mollify(f, 0.5);
  ModelParams params{3.0, 0.5};
  TimeGrid tg(1.0, 32);

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };

  // domain shorter than the initial support
  CHECK(code_of([&] {
          pde::solve_robin_pde(f_eps, zero_boundary(tg), params, SpaceGrid(1.2, 64));
        }) == ErrorCode::GridMismatch);

  // boundary slope above the stepper's Robin gate alpha/(2 eps)
  std::vector<double> steep(static_cast<std::size_t>(tg.n_nodes()));
  for (int k = 0; k < tg.n_nodes(); ++k) steep[static_cast<std::size_t>(k)] = 4.0 * tg.t(k);
  BoundaryPath fast{tg, steep, 4.0};
  CHECK(code_of([&] { pde::solve_robin_pde(f_eps, fast, params, SpaceGrid(8.0, 256)); }) ==
        ErrorCode::PreconditionLipschitz);

  // decreasing boundary violates the path invariants outright
  std::vector<double> down(static_cast<std::size_t>(tg.n_nodes()), 0.0);
  down.back() = -0.1;
  BoundaryPath bad{tg, down, 1.0};
  CHECK(code_of([&] { pde::solve_robin_pde(f_eps, bad, params, SpaceGrid(8.0, 256)); }) ==
        ErrorCode::PreconditionFailed);

  // absurd step ratio
  CHECK(code_of([&] {
          pde::RobinStepper(f_eps, params, TimeGrid(1e9, 1), SpaceGrid(8.0, 16384));
        }) == ErrorCode::CFLUnreasonable);

  // epsilon disagreement between the smoothed profile and the parameters
  CHECK(code_of([&] {
          pde::solve_robin_pde(f_eps, zero_boundary(tg), ModelParams{3.0, 0.25},
                               SpaceGrid(8.0, 256));
        }) == ErrorCode::PreconditionFailed);
}
