#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "stefan/grids.hpp"

namespace stefan::skorokhod {

struct DiscretePath {
  TimeGrid grid;
  std::vector<double> values;  // length n_steps + 1
};

// Decomposition y = (y + l) - l with reflected = y + l >= 0 and l the minimal
// non-decreasing pushing term; l is the local time at 0 of the reflected path.
struct ReflectedPath {
  DiscretePath reflected;
  DiscretePath regulator;
};

// l(t_k) = max(0, -min_{j<=k} y(t_j)), one forward pass over a running minimum.
DiscretePath regulator(const DiscretePath& y);

// (y + l, l).  Exact complementarity: l increases only where reflected == 0.
ReflectedPath reflect(const DiscretePath& y);

// Conditional minimum of a Brownian bridge over one step, given endpoint
// values a, b and a uniform w in (0,1):
//   m = ((a+b) - sqrt((b-a)^2 - 2 dt log w)) / 2.
// m <= min(a,b); non-decreasing in both a and b for fixed w, which keeps
// pathwise-coupled ensembles ordered after refinement.  The final clamp makes
// the endpoint bound exact in floating point (the raw formula can round one
// ulp above it), so regulator ordering and w -> 1 degeneration hold bitwise.
inline double bridge_minimum(double a, double b, double dt, double w) {
  double lo = std::min(a, b);
  if (w >= 1.0) return lo;
  double d = b - a;
  return std::min(lo, 0.5 * ((a + b) - std::sqrt(d * d - 2.0 * dt * std::log(w))));
}

// Regulator of the path refined with per-step bridge minima.  Precondition:
// y was built as y(t_k) = x0 + B(t_k) - Lam(t_k) on its grid, so that within
// a step the unresolved motion is a Brownian bridge (drift over a step is
// treated as linear; its bridge correction is second order).  w supplies one
// uniform per step.
DiscretePath bridge_refined_regulator(const DiscretePath& y, std::span<const double> w);

}  // namespace stefan::skorokhod
