#include "stefan/robin_pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "stefan/errors.hpp"

namespace stefan::pde {
namespace {

constexpr std::size_t kStoreCap = std::size_t{1} << 24;  // entries, ~128 MiB

double trapezoid_mass(const std::vector<double>& p, double dx) {
  double s = 0.5 * (p.front() + p.back());
  for (std::size_t i = 1; i + 1 < p.size(); ++i) s += p[i];
  return s * dx;
}

}  // namespace

RobinStepper::RobinStepper(const MollifiedDensity& f_eps, const ModelParams& params,
                           const TimeGrid& tgrid, const SpaceGrid& xgrid, bool zero_robin)
    : tgrid_(tgrid),
      xgrid_(xgrid),
      alpha_(params.alpha),
      epsilon_(params.epsilon),
      f_sup_(f_eps.sup_norm()),
      zero_robin_(zero_robin) {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_))
    raise(ErrorCode::PreconditionFailed, "alpha must be positive and finite");
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_))
    raise(ErrorCode::NonPositiveEpsilon, "boundary-layer width must be positive");
  if (!(xgrid_.x_max > f_eps.support_upper()))
    raise(ErrorCode::GridMismatch, "x_max must exceed the support of the initial data");
  // The scheme is unconditionally stable, but a grid ratio beyond double
  // precision makes the linear algebra meaningless.
  const double ratio = tgrid_.dt / (xgrid_.dx * xgrid_.dx);
  if (!std::isfinite(ratio) || ratio > 1e15)
    raise(ErrorCode::CFLUnreasonable, "dt/dx^2 ratio is degenerate");

  p0_.resize(xgrid_.n_nodes());
  for (std::size_t i = 0; i < p0_.size(); ++i) p0_[i] = f_eps.evaluate(xgrid_.x(static_cast<int>(i)));
  p0_.back() = 0.0;  // absorbing wall
}

std::vector<double> RobinStepper::initial_state() const { return p0_; }

void RobinStepper::refactor(double lam_prime) const {
  const double dt = tgrid_.dt, dx = xgrid_.dx;
  const std::size_t n = xgrid_.n_nodes();
  fact_.upper_ratio.assign(n, 0.0);
  fact_.inv_diag.assign(n, 0.0);

  const double robin = zero_robin_ ? 0.0 : alpha_ / epsilon_ - 2.0 * lam_prime;
  if (!zero_robin_ && robin < 0.0)
    raise(ErrorCode::PreconditionLipschitz, "boundary slope exceeds the Robin-stability bound");

  const double diff = dt / (dx * dx);
  const double drift = dt * lam_prime / dx;
  const double lower = -0.5 * diff;  // rows 1..N-1

  // Row 0: ghost-node closure of the Robin flux against the centered stencil.
  double diag = 1.0 + diff * (1.0 + dx * robin) + drift;
  double upper = -diff - drift;
  double m = diag;
  fact_.inv_diag[0] = 1.0 / m;
  fact_.upper_ratio[0] = upper * fact_.inv_diag[0];

  diag = 1.0 + diff + drift;
  upper = -0.5 * diff - drift;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m = diag - lower * fact_.upper_ratio[i - 1];
    fact_.inv_diag[i] = 1.0 / m;
    fact_.upper_ratio[i] = upper * fact_.inv_diag[i];
  }
  fact_.inv_diag[n - 1] = 1.0;  // Dirichlet row: identity, no lower coupling
  fact_.upper_ratio[n - 1] = 0.0;

  fact_.lam_prime = lam_prime;
  fact_.valid = true;
}

void RobinStepper::advance(std::vector<double>& p, int k0, int k1, const double* lam,
                           const std::function<void(int, const std::vector<double>&)>& on_node) const {
  if (p.size() != static_cast<std::size_t>(xgrid_.n_nodes()))
    raise(ErrorCode::GridMismatch, "state length does not match the space grid");
  const double dt = tgrid_.dt;
  const double lower = -0.5 * tgrid_.dt / (xgrid_.dx * xgrid_.dx);
  const std::size_t n = p.size();
  std::vector<double> rp(n);

  for (int k = k0; k < k1; ++k) {
    const double lam_prime = (lam[k + 1] - lam[k]) / dt;
    if (!(lam_prime >= 0.0) || !std::isfinite(lam_prime))
      raise(ErrorCode::PreconditionLipschitz, "boundary must be non-decreasing");
    if (!fact_.valid || lam_prime != fact_.lam_prime) refactor(lam_prime);

    // Thomas solve with cached forward coefficients; the nonnegative stencil
    // keeps p >= 0 exactly (every arithmetic step combines nonnegatives).
    rp[0] = p[0] * fact_.inv_diag[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
      rp[i] = (p[i] - lower * rp[i - 1]) * fact_.inv_diag[i];
    rp[n - 1] = 0.0;
    p[n - 1] = 0.0;
    for (std::size_t i = n - 1; i-- > 0;) p[i] = rp[i] - fact_.upper_ratio[i] * p[i + 1];

    if (on_node) on_node(k + 1, p);
  }
}

DensityField solve_robin_pde(const MollifiedDensity& f_eps, const BoundaryPath& lambda,
                             const ModelParams& params, const SpaceGrid& xgrid,
                             const SolveOptions& options) {
  if (f_eps.epsilon() != params.epsilon)
    raise(ErrorCode::PreconditionFailed, "mollification width disagrees with the model parameters");
  check_boundary_invariants(lambda, "solve_robin_pde");

  RobinStepper stepper(f_eps, params, lambda.grid, xgrid, options.zero_robin);
  const double lip_cap = stepper.f_sup() / params.epsilon;
  if (lambda.lipschitz_bound > lip_cap * (1.0 + 1e-9) + 1e-12)
    raise(ErrorCode::PreconditionLipschitz,
          "boundary Lipschitz bound exceeds sup|f_eps|/eps");

  const std::size_t xn = xgrid.n_nodes();
  const std::size_t tn = lambda.grid.n_nodes();
  bool store = options.store == SolveOptions::Store::on ||
               (options.store == SolveOptions::Store::automatic && tn * xn <= kStoreCap);

  DensityField field;
  field.tgrid = lambda.grid;
  field.xgrid = xgrid;
  field.f_sup = stepper.f_sup();
  field.boundary_trace.resize(tn);
  field.mass.resize(tn);
  if (store) field.values.emplace(tn * xn);

  std::vector<double> p = stepper.initial_state();
  auto record = [&](int k, const std::vector<double>& state) {
    field.boundary_trace[k] = state[0];
    field.mass[k] = trapezoid_mass(state, xgrid.dx);
    auto [lo, hi] = std::minmax_element(state.begin(), state.end());
    field.min_value = std::min(field.min_value, *lo);
    field.max_value = std::max(field.max_value, *hi);
    if (field.values)
      std::copy(state.begin(), state.end(), field.values->begin() + static_cast<std::size_t>(k) * xn);
  };
  field.min_value = p[0];
  field.max_value = p[0];
  record(0, p);
  stepper.advance(p, 0, lambda.grid.n_steps, lambda.values.data(), record);
  return field;
}

BoundaryPath evaluate_F_pde(const DensityField& field, const ModelParams& params) {
  if (!(params.epsilon > 0.0))
    raise(ErrorCode::NonPositiveEpsilon, "boundary-layer width must be positive");
  const TimeGrid& grid = field.tgrid;
  std::vector<double> values(grid.n_nodes());
  values[0] = 0.0;
  const double half_dt = 0.5 * grid.dt / params.epsilon;
  for (int k = 0; k < grid.n_steps; ++k)
    values[k + 1] = values[k] + half_dt * (field.boundary_trace[k] + field.boundary_trace[k + 1]);
  return BoundaryPath{grid, std::move(values), field.f_sup / params.epsilon};
}

std::vector<double> mass_identity_residual(const DensityField& field, const BoundaryPath& F,
                                           const ModelParams& params) {
  require_same_grid(field.tgrid, F.grid, "mass_identity_residual");
  std::vector<double> r(field.mass.size());
  for (std::size_t k = 0; k < r.size(); ++k)
    r[k] = std::abs(field.mass[k] + 0.5 * params.alpha * F.values[k] - 1.0);
  return r;
}

}  // namespace stefan::pde
