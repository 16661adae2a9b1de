#pragma once

#include <vector>

namespace stefan {

// Reference smoothing kernel rho(x) = C * exp(-1/(x(1-x))) on (0,1), zero
// elsewhere; C normalizes the mass to 1.  Smooth, compactly supported in
// (0, infinity), and symmetric about 1/2 (so its median is exactly 1/2).
//
// The CDF R and its antiderivative Q(x) = \int_0^x R are tabulated once on a
// uniform grid.  Composite trapezoid converges superalgebraically for this
// kernel (all derivatives vanish at the endpoints), so at 32768 panels the
// tables are accurate to ~1e-13 and interpolation error stays near 1e-9,
// inside the 1e-8 consistency budget of everything built on top.
class MollifierKernel {
 public:
  static const MollifierKernel& instance();

  double normalization() const { return norm_; }
  double density(double x) const;

  // CDF R(x); 0 for x <= 0, 1 for x >= 1; linear interpolation in between.
  double cdf(double x) const;

  // Generalized inverse of R on (0,1), linear interpolation on the table.
  double inverse_cdf(double p) const;

  // Q(x) = \int_0^x R(s) ds, extended linearly by Q(1) + (x-1) for x > 1.
  // Appears in closed-form CDFs of mollified piecewise-constant densities.
  double integral_cdf(double x) const;

 private:
  MollifierKernel();

  static constexpr int kPanels = 32768;
  std::vector<double> cdf_;       // R at j/kPanels
  std::vector<double> int_cdf_;   // Q at j/kPanels
  double norm_ = 0.0;
};

}  // namespace stefan
