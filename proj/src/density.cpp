#include "stefan/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stefan/errors.hpp"

namespace stefan {
namespace {

struct Analyzer {
  double mass = 0.0, sup = 0.0, min_value = 0.0, lower = 0.0, upper = 0.0;

  void operator()(const UniformDensity& u) {
    if (!(u.b > u.a)) raise(ErrorCode::PreconditionFailed, "uniform density needs b > a");
    mass = 1.0;
    sup = 1.0 / (u.b - u.a);
    min_value = 0.0;
    lower = u.a;
    upper = u.b;
  }

  void operator()(const PiecewiseConstantDensity& p) {
    if (p.breakpoints.size() != p.heights.size() + 1 || p.heights.empty())
      raise(ErrorCode::PreconditionFailed, "piecewise density needs m+1 breakpoints for m heights");
    if (!std::is_sorted(p.breakpoints.begin(), p.breakpoints.end()) ||
        std::adjacent_find(p.breakpoints.begin(), p.breakpoints.end()) != p.breakpoints.end())
      raise(ErrorCode::PreconditionFailed, "piecewise breakpoints must be strictly increasing");
    for (std::size_t j = 0; j < p.heights.size(); ++j) {
      double w = p.breakpoints[j + 1] - p.breakpoints[j];
      mass += p.heights[j] * w;
      sup = std::max(sup, p.heights[j]);
      min_value = std::min(min_value, p.heights[j]);
    }
    lower = p.breakpoints.front();
    upper = p.breakpoints.back();
  }

  void operator()(const TabulatedDensity& t) {
    if (t.x.size() != t.f.size() || t.x.size() < 2)
      raise(ErrorCode::PreconditionFailed, "tabulated density needs matching x/f with >= 2 samples");
    if (!std::is_sorted(t.x.begin(), t.x.end()) ||
        std::adjacent_find(t.x.begin(), t.x.end()) != t.x.end())
      raise(ErrorCode::PreconditionFailed, "tabulated positions must be strictly increasing");
    for (std::size_t j = 0; j + 1 < t.x.size(); ++j)
      mass += 0.5 * (t.f[j] + t.f[j + 1]) * (t.x[j + 1] - t.x[j]);
    for (double v : t.f) {
      sup = std::max(sup, v);
      min_value = std::min(min_value, v);
    }
    lower = t.x.front();
    upper = t.x.back();
  }
};

}  // namespace

DensitySpec::DensitySpec(Kind kind) : kind_(std::move(kind)) {
  Analyzer a;
  std::visit(a, kind_);
  mass_ = a.mass;
  sup_norm_ = a.sup;
  min_value_ = a.min_value;
  support_lower_ = a.lower;
  support_upper_ = a.upper;
}

DensitySpec DensitySpec::uniform(double a, double b) {
  return DensitySpec(Kind{UniformDensity{a, b}});
}

DensitySpec DensitySpec::piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<double> heights) {
  return DensitySpec(Kind{PiecewiseConstantDensity{std::move(breakpoints), std::move(heights)}});
}

DensitySpec DensitySpec::tabulated(std::vector<double> x, std::vector<double> f) {
  return DensitySpec(Kind{TabulatedDensity{std::move(x), std::move(f)}});
}

double DensitySpec::pdf(double x) const {
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return (x > k.a && x < k.b) ? 1.0 / (k.b - k.a) : 0.0;
        } else if constexpr (std::is_same_v<T, PiecewiseConstantDensity>) {
          if (x <= k.breakpoints.front() || x >= k.breakpoints.back()) return 0.0;
          auto it = std::upper_bound(k.breakpoints.begin(), k.breakpoints.end(), x);
          return k.heights[static_cast<std::size_t>(it - k.breakpoints.begin()) - 1];
        } else {
          if (x <= k.x.front() || x >= k.x.back()) return 0.0;
          auto it = std::upper_bound(k.x.begin(), k.x.end(), x);
          std::size_t j = static_cast<std::size_t>(it - k.x.begin()) - 1;
          double frac = (x - k.x[j]) / (k.x[j + 1] - k.x[j]);
          return k.f[j] + frac * (k.f[j + 1] - k.f[j]);
        }
      },
      kind_);
}

double DensitySpec::cdf(double x) const {
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          if (x <= k.a) return 0.0;
          if (x >= k.b) return 1.0;
          return (x - k.a) / (k.b - k.a);
        } else if constexpr (std::is_same_v<T, PiecewiseConstantDensity>) {
          if (x <= k.breakpoints.front()) return 0.0;
          double acc = 0.0;
          for (std::size_t j = 0; j < k.heights.size(); ++j) {
            double lo = k.breakpoints[j], hi = k.breakpoints[j + 1];
            if (x >= hi) {
              acc += k.heights[j] * (hi - lo);
            } else {
              acc += k.heights[j] * (x - lo);
              break;
            }
          }
          return acc;
        } else {
          if (x <= k.x.front()) return 0.0;
          double acc = 0.0;
          for (std::size_t j = 0; j + 1 < k.x.size(); ++j) {
            double lo = k.x[j], hi = k.x[j + 1];
            if (x >= hi) {
              acc += 0.5 * (k.f[j] + k.f[j + 1]) * (hi - lo);
            } else {
              double frac = (x - lo) / (hi - lo);
              double fx = k.f[j] + frac * (k.f[j + 1] - k.f[j]);
              acc += 0.5 * (k.f[j] + fx) * (x - lo);
              break;
            }
          }
          return acc;
        }
      },
      kind_);
}

double DensitySpec::inverse_cdf(double u) const {
  double target = u * mass_;
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return k.a + u * (k.b - k.a);
        } else if constexpr (std::is_same_v<T, PiecewiseConstantDensity>) {
          double acc = 0.0;
          for (std::size_t j = 0; j < k.heights.size(); ++j) {
            double w = k.breakpoints[j + 1] - k.breakpoints[j];
            double piece = k.heights[j] * w;
            if (acc + piece >= target && k.heights[j] > 0.0) {
              return k.breakpoints[j] + (target - acc) / k.heights[j];
            }
            acc += piece;
          }
          return k.breakpoints.back();
        } else {
          double lo = k.x.front(), hi = k.x.back();
          for (int it = 0; it < 200 && hi - lo > 1e-14 * (std::abs(hi) + 1.0); ++it) {
            double mid = 0.5 * (lo + hi);
            if (cdf(mid) < target)
              lo = mid;
            else
              hi = mid;
          }
          return hi;
        }
      },
      kind_);
}

}  // namespace stefan
