#include "stefan/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace stefan {
namespace {

double bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (x * (1.0 - x)));
}

}  // namespace

const MollifierKernel& MollifierKernel::instance() {
  static const MollifierKernel kernel;
  return kernel;
}

MollifierKernel::MollifierKernel() {
  const int n = kPanels;
  const double h = 1.0 / n;
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) values[j] = bump(j * h);

  // cumulative trapezoid of the un-normalized bump
  std::vector<double> cum(static_cast<std::size_t>(n) + 1, 0.0);
  for (int j = 1; j <= n; ++j) cum[j] = cum[j - 1] + 0.5 * h * (values[j - 1] + values[j]);
  norm_ = 1.0 / cum[n];

  cdf_.resize(cum.size());
  for (std::size_t j = 0; j < cum.size(); ++j) cdf_[j] = cum[j] * norm_;
  cdf_.back() = 1.0;

  int_cdf_.resize(cdf_.size());
  int_cdf_[0] = 0.0;
  for (int j = 1; j <= n; ++j)
    int_cdf_[j] = int_cdf_[j - 1] + 0.5 * h * (cdf_[j - 1] + cdf_[j]);
}

double MollifierKernel::density(double x) const {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return norm_ * std::exp(-1.0 / (x * (1.0 - x)));
}

double MollifierKernel::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double pos = x * kPanels;
  int j = static_cast<int>(pos);
  if (j >= kPanels) j = kPanels - 1;
  double frac = pos - j;
  return cdf_[j] + frac * (cdf_[j + 1] - cdf_[j]);
}

double MollifierKernel::inverse_cdf(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
  int j = static_cast<int>(it - cdf_.begin()) - 1;
  if (j < 0) j = 0;
  if (j >= kPanels) j = kPanels - 1;
  double lo = cdf_[j], hi = cdf_[j + 1];
  double frac = hi > lo ? (p - lo) / (hi - lo) : 0.0;
  return (j + frac) / kPanels;
}

double MollifierKernel::integral_cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return int_cdf_.back() + (x - 1.0);
  double pos = x * kPanels;
  int j = static_cast<int>(pos);
  if (j >= kPanels) j = kPanels - 1;
  double frac = pos - j;
  double h = 1.0 / kPanels;
  // quadratic interpolation consistent with d/dx Q = R (R linear on the panel)
  double r_lo = cdf_[j];
  double r_at = r_lo + frac * (cdf_[j + 1] - r_lo);
  return int_cdf_[j] + 0.5 * frac * h * (r_lo + r_at);
}

}  // namespace stefan
