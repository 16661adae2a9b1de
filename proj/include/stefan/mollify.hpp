#pragma once

#include "stefan/density.hpp"

namespace stefan {

// Smoothed profile f_eps = f * rho_eps with rho_eps(x) = rho(x/eps)/eps and
// the reference kernel (kernel.hpp; support length S = 1, so the smoothing
// shifts support into (lower, upper + eps)).  For the analytic density kinds
// both the density and the CDF have closed forms in the kernel CDF R and its
// antiderivative Q; tabulated inputs fall back to quadrature in the kernel
// variable.  inverse_cdf is bisection on the CDF, consistent with it to well
// below the 1e-8 budget.
class MollifiedDensity {
 public:
  MollifiedDensity(DensitySpec base, double epsilon);

  double evaluate(double x) const;
  double cdf(double x) const;
  double inverse_cdf(double p) const;

  double epsilon() const { return epsilon_; }
  double kernel_support() const { return 1.0; }
  double mass() const { return mass_; }
  double sup_norm() const { return sup_norm_; }
  double support_lower() const { return base_.support_lower(); }
  double support_upper() const { return base_.support_upper() + epsilon_; }
  const DensitySpec& base() const { return base_; }

 private:
  DensitySpec base_;
  double epsilon_;
  double mass_ = 0.0;
  double sup_norm_ = 0.0;
};

// Builds f_eps; rejects epsilon <= 0 (NonPositiveEpsilon).
MollifiedDensity mollify(const DensitySpec& f, double epsilon);

}  // namespace stefan
