#include "stefan/skorokhod.hpp"

#include <algorithm>

#include "stefan/errors.hpp"

namespace stefan::skorokhod {
namespace {

void require_path(const DiscretePath& y, const char* where) {
  if (static_cast<int>(y.values.size()) != y.grid.n_nodes())
    raise(ErrorCode::GridMismatch, std::string(where) + ": path length does not match its grid");
}

}  // namespace

DiscretePath regulator(const DiscretePath& y) {
  require_path(y, "regulator");
  DiscretePath l{y.grid, std::vector<double>(y.values.size())};
  double runmin = y.values[0];
  for (std::size_t k = 0; k < y.values.size(); ++k) {
    runmin = std::min(runmin, y.values[k]);
    l.values[k] = std::max(0.0, -runmin);
  }
  return l;
}

ReflectedPath reflect(const DiscretePath& y) {
  DiscretePath l = regulator(y);
  DiscretePath r{y.grid, std::vector<double>(y.values.size())};
  for (std::size_t k = 0; k < y.values.size(); ++k) r.values[k] = y.values[k] + l.values[k];
  return {std::move(r), std::move(l)};
}

DiscretePath bridge_refined_regulator(const DiscretePath& y, std::span<const double> w) {
  require_path(y, "bridge_refined_regulator");
  if (w.size() + 1 != y.values.size())
    raise(ErrorCode::GridMismatch, "bridge_refined_regulator: need one uniform per step");
  DiscretePath l{y.grid, std::vector<double>(y.values.size())};
  double dt = y.grid.dt;
  double runmin = y.values[0];
  l.values[0] = std::max(0.0, -runmin);
  for (std::size_t k = 0; k + 1 < y.values.size(); ++k) {
    runmin = std::min(runmin, bridge_minimum(y.values[k], y.values[k + 1], dt, w[k]));
    l.values[k + 1] = std::max(0.0, -runmin);
  }
  return l;
}

}  // namespace stefan::skorokhod
