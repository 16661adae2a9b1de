#include "stefan/model.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/errors.hpp"
#include "stefan/kernel.hpp"

namespace stefan {

void validate_model(const DensitySpec& f, const ModelParams& params) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha))
    raise(ErrorCode::PreconditionFailed, "alpha must be positive and finite");
  if (params.epsilon < 0.0 || !std::isfinite(params.epsilon))
    raise(ErrorCode::NonPositiveEpsilon, "epsilon must be >= 0 (0 selects the limit problem)");
  if (f.support_lower() < 0.0)
    raise(ErrorCode::PreconditionFailed, "density support must lie in [0, infinity)");
  if (f.min_value() < 0.0)
    raise(ErrorCode::NegativeDensity, "density takes a negative value on its support");
  if (std::abs(f.mass() - 1.0) > 1e-12)
    raise(ErrorCode::NotNormalized,
          "density mass is " + std::to_string(f.mass()) + ", expected 1 within 1e-12");
  if (!(f.sup_norm() < params.alpha / 2.0))
    raise(ErrorCode::SupercriticalSupNorm,
          "sup-norm " + std::to_string(f.sup_norm()) + " must be strictly below alpha/2 = " +
              std::to_string(params.alpha / 2.0));
}

double sample_coupled_initial(const DensitySpec& f, double epsilon, double u, double v) {
  constexpr double kMargin = 1e-15;
  u = std::clamp(u, kMargin, 1.0 - kMargin);
  v = std::clamp(v, kMargin, 1.0 - kMargin);
  double x0 = f.inverse_cdf(u);
  if (epsilon <= 0.0) return x0;
  return x0 + epsilon * MollifierKernel::instance().inverse_cdf(v);
}

}  // namespace stefan
