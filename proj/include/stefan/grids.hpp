#pragma once

#include <cmath>
#include <string>

#include "stefan/errors.hpp"

namespace stefan {

// Uniform clock on [0, t_max].  Nodes are t_k = k*dt, k = 0..n_steps; every
// path, boundary, and PDE time-stepper in the suite shares one of these.
struct TimeGrid {
  double t_max = 1.0;
  int n_steps = 1;
  double dt = 1.0;

  TimeGrid() = default;
  TimeGrid(double t_max_, int n_steps_) : t_max(t_max_), n_steps(n_steps_) {
    if (!(t_max > 0.0) || !std::isfinite(t_max) || n_steps < 1)
      raise(ErrorCode::GridMismatch, "time grid requires t_max > 0 and n_steps >= 1");
    dt = t_max / n_steps;
  }

  double t(int k) const { return k * dt; }
  int n_nodes() const { return n_steps + 1; }
  bool same_as(const TimeGrid& o) const { return t_max == o.t_max && n_steps == o.n_steps; }

  // Nearest node index for an on-grid time; rejects off-grid queries.
  int node_index(double t_query) const {
    double k = t_query / dt;
    double kr = std::round(k);
    if (kr < 0 || kr > n_steps || std::abs(k - kr) > 1e-9 * (std::abs(k) + 1.0))
      raise(ErrorCode::PreconditionFailed, "time " + std::to_string(t_query) + " is not a grid node");
    return static_cast<int>(kr);
  }
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where) {
  if (!a.same_as(b))
    raise(ErrorCode::GridMismatch, std::string(where) + ": time grids differ");
}

// Uniform discretization of [0, x_max] into n_cells cells; nodes x_i = i*dx.
struct SpaceGrid {
  double x_max = 1.0;
  int n_cells = 1;
  double dx = 1.0;

  SpaceGrid() = default;
  SpaceGrid(double x_max_, int n_cells_) : x_max(x_max_), n_cells(n_cells_) {
    if (!(x_max > 0.0) || !std::isfinite(x_max) || n_cells < 2)
      raise(ErrorCode::GridMismatch, "space grid requires x_max > 0 and n_cells >= 2");
    dx = x_max / n_cells;
  }

  double x(int i) const { return i * dx; }
  int n_nodes() const { return n_cells + 1; }
};

/// Default truncation rule: the Gaussian tail beyond 6 standard deviations of
// the terminal time is below every tolerance used in the suite.
inline double default_x_max(double support_upper, double t_max) {
  return support_upper + 6.0 * std::sqrt(t_max);
}

}  // namespace stefan
