#include "stefan/mollify.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/errors.hpp"
#include "stefan/kernel.hpp"

namespace stefan {
namespace {

constexpr int kQuadPanels = 1024;  // kernel-variable quadrature for tabulated inputs
constexpr int kScanPoints = 16384;

double quad_density(const DensitySpec& f, double eps, double x) {
  const auto& kernel = MollifierKernel::instance();
  double h = 1.0 / kQuadPanels;
  double acc = 0.0;
  for (int j = 0; j <= kQuadPanels; ++j) {
    double z = j * h;
    double w = (j == 0 || j == kQuadPanels) ? 0.5 : 1.0;
    acc += w * f.pdf(x - eps * z) * kernel.density(z);
  }
  return acc * h;
}

double quad_cdf(const DensitySpec& f, double eps, double x) {
  const auto& kernel = MollifierKernel::instance();
  double h = 1.0 / kQuadPanels;
  double acc = 0.0;
  for (int j = 0; j <= kQuadPanels; ++j) {
    double z = j * h;
    double w = (j == 0 || j == kQuadPanels) ? 0.5 : 1.0;
    acc += w * f.cdf(x - eps * z) * kernel.density(z);
  }
  return acc * h;
}

}  // namespace

MollifiedDensity::MollifiedDensity(DensitySpec base, double epsilon)
    : base_(std::move(base)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0)) raise(ErrorCode::NonPositiveEpsilon, "mollification needs epsilon > 0");
  mass_ = cdf(support_upper() + epsilon_);

  // Sup norm: where the base has a constant piece at least eps wide, the
  // convolution attains that height exactly (the kernel mass sits inside the
  // piece); otherwise fall back to a dense scan.
  double plateau = 0.0;
  if (const auto* u = std::get_if<UniformDensity>(&base_.kind())) {
    if (u->b - u->a >= epsilon_) plateau = 1.0 / (u->b - u->a);
  } else if (const auto* p = std::get_if<PiecewiseConstantDensity>(&base_.kind())) {
    for (std::size_t j = 0; j < p->heights.size(); ++j)
      if (p->breakpoints[j + 1] - p->breakpoints[j] >= epsilon_)
        plateau = std::max(plateau, p->heights[j]);
  }
  double scan = 0.0;
  double lo = support_lower(), hi = support_upper();
  for (int j = 0; j <= kScanPoints; ++j)
    scan = std::max(scan, evaluate(lo + (hi - lo) * j / kScanPoints));
  sup_norm_ = std::max(plateau, scan);
}

double MollifiedDensity::evaluate(double x) const {
  const auto& kernel = MollifierKernel::instance();
  if (x <= support_lower() || x >= support_upper()) return 0.0;
  if (const auto* u = std::get_if<UniformDensity>(&base_.kind())) {
    return (kernel.cdf((x - u->a) / epsilon_) - kernel.cdf((x - u->b) / epsilon_)) / (u->b - u->a);
  }
  if (const auto* p = std::get_if<PiecewiseConstantDensity>(&base_.kind())) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p->heights.size(); ++j)
      acc += p->heights[j] * (kernel.cdf((x - p->breakpoints[j]) / epsilon_) -
                              kernel.cdf((x - p->breakpoints[j + 1]) / epsilon_));
    return acc;
  }
  return quad_density(base_, epsilon_, x);
}

double MollifiedDensity::cdf(double x) const {
  const auto& kernel = MollifierKernel::instance();
  if (x <= support_lower()) return 0.0;
  if (const auto* u = std::get_if<UniformDensity>(&base_.kind())) {
    return epsilon_ *
           (kernel.integral_cdf((x - u->a) / epsilon_) - kernel.integral_cdf((x - u->b) / epsilon_)) /
           (u->b - u->a);
  }
  if (const auto* p = std::get_if<PiecewiseConstantDensity>(&base_.kind())) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p->heights.size(); ++j)
      acc += p->heights[j] * epsilon_ *
             (kernel.integral_cdf((x - p->breakpoints[j]) / epsilon_) -
              kernel.integral_cdf((x - p->breakpoints[j + 1]) / epsilon_));
    return acc;
  }
  return quad_cdf(base_, epsilon_, x);
}

double MollifiedDensity::inverse_cdf(double p) const {
  double lo = support_lower();
  double hi = support_upper();
  if (p <= 0.0) return lo;
  if (p >= mass_) return hi;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

MollifiedDensity mollify(const DensitySpec& f, double epsilon) {
  return MollifiedDensity(f, epsilon);
}

}  // namespace stefan
