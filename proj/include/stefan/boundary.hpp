#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stefan/errors.hpp"
#include "stefan/grids.hpp"

namespace stefan {

// A candidate or solved free boundary sampled on a TimeGrid: starts at 0,
// non-decreasing, with per-step growth at most lipschitz_bound * dt.
struct BoundaryPath {
  TimeGrid grid;
  std::vector<double> values;
  double lipschitz_bound = 0.0;

  double at(int k) const { return values[static_cast<std::size_t>(k)]; }
};

inline BoundaryPath zero_boundary(const TimeGrid& grid) {
  return {grid, std::vector<double>(static_cast<std::size_t>(grid.n_nodes()), 0.0), 0.0};
}

inline void check_boundary_invariants(const BoundaryPath& path, const char* where) {
  const auto& v = path.values;
  if (static_cast<int>(v.size()) != path.grid.n_nodes())
    raise(ErrorCode::GridMismatch, std::string(where) + ": boundary length does not match its grid");
  if (v[0] != 0.0)
    raise(ErrorCode::PreconditionFailed, std::string(where) + ": boundary must start at 0");
  double step_cap = path.lipschitz_bound * path.grid.dt;
  for (std::size_t k = 1; k < v.size(); ++k) {
    double inc = v[k] - v[k - 1];
    if (inc < 0.0)
      raise(ErrorCode::PreconditionFailed, std::string(where) + ": boundary must be non-decreasing");
    // relative slack: clamped rebuilds satisfy the cap exactly, while paths
    // assembled from quadrature may exceed it by accumulated roundoff
    if (inc > step_cap + 1e-10 * (step_cap + path.grid.dt))
      raise(ErrorCode::PreconditionLipschitz,
            std::string(where) + ": boundary step exceeds lipschitz_bound * dt");
  }
}

inline BoundaryPath boundary_from_values(const TimeGrid& grid, std::vector<double> values,
                                         double lipschitz_bound) {
  BoundaryPath path{grid, std::move(values), lipschitz_bound};
  check_boundary_invariants(path, "boundary_from_values");
  return path;
}

// Forward rebuild enforcing the invariants exactly:
//   v[0] = 0,  v[k+1] = min(max(raw[k+1], v[k]), v[k] + lip*dt).
// Entrywise monotone in `raw`, so pathwise-coupled inputs stay ordered.
inline BoundaryPath clamped_boundary(const TimeGrid& grid, const std::vector<double>& raw,
                                     double lipschitz_bound) {
  if (static_cast<int>(raw.size()) != grid.n_nodes())
    raise(ErrorCode::GridMismatch, "clamped_boundary: value count does not match the grid");
  std::vector<double> v(raw.size());
  v[0] = 0.0;
  double cap = lipschitz_bound * grid.dt;
  for (std::size_t k = 1; k < raw.size(); ++k)
    v[k] = std::min(std::max(raw[k], v[k - 1]), v[k - 1] + cap);
  return {grid, std::move(v), lipschitz_bound};
}

inline double sup_diff(const BoundaryPath& a, const BoundaryPath& b) {
  require_same_grid(a.grid, b.grid, "sup_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

// Largest per-step increment divided by dt; a valid Lipschitz bound for any
// non-decreasing sampled path.
inline double observed_lipschitz(const TimeGrid& grid, const std::vector<double>& values) {
  double m = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k)
    m = std::max(m, values[k] - values[k - 1]);
  return m / grid.dt;
}

}  // namespace stefan
