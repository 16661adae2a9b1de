#pragma once

#include <variant>
#include <vector>

namespace stefan {

// Initial temperature profiles.  Constructors check structural sanity only;
// the model-level gate (validate_model) owns non-negativity, normalization,
// and the sup-norm bound, so that rejectable inputs can be represented.

struct UniformDensity {
  double a;
  double b;  // density 1/(b-a) on (a,b); normalized by construction
};

struct PiecewiseConstantDensity {
  std::vector<double> breakpoints;  // size m+1, strictly increasing
  std::vector<double> heights;      // size m; may be unnormalized or negative
};

struct TabulatedDensity {
  std::vector<double> x;  // strictly increasing sample positions
  std::vector<double> f;  // sampled values, linearly interpolated
};

class DensitySpec {
 public:
  using Kind = std::variant<UniformDensity, PiecewiseConstantDensity, TabulatedDensity>;

  static DensitySpec uniform(double a, double b);
  static DensitySpec piecewise_constant(std::vector<double> breakpoints,
                                        std::vector<double> heights);
  static DensitySpec tabulated(std::vector<double> x, std::vector<double> f);

  double pdf(double x) const;
  double cdf(double x) const;
  // Generalized inverse of the CDF (leftmost solution); exact for the
  // analytic kinds, bisection for tabulated ones.
  double inverse_cdf(double u) const;

  double mass() const { return mass_; }
  double sup_norm() const { return sup_norm_; }
  double min_value() const { return min_value_; }
  double support_lower() const { return support_lower_; }
  double support_upper() const { return support_upper_; }
  const Kind& kind() const { return kind_; }

 private:
  explicit DensitySpec(Kind kind);

  Kind kind_;
  double mass_ = 0.0;
  double sup_norm_ = 0.0;
  double min_value_ = 0.0;  // most negative sampled value; < 0 flags invalid input
  double support_lower_ = 0.0;
  double support_upper_ = 0.0;
};

}  // namespace stefan
