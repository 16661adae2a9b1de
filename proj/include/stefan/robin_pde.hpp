#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "stefan/boundary.hpp"
#include "stefan/grids.hpp"
#include "stefan/model.hpp"
#include "stefan/mollify.hpp"

namespace stefan::pde {

// Solution of the fixed-boundary Robin problem on a space-time grid.
// The full matrix is kept only when small or requested; the boundary trace,
// the mass ledger, and the field extrema are always recorded, so maximum-
// principle audits cover every node without O(time * space) memory.
struct DensityField {
  TimeGrid tgrid;
  SpaceGrid xgrid;
  std::optional<std::vector<double>> values;  // row-major [time][space] when stored
  std::vector<double> boundary_trace;         // p(t_k, 0)
  std::vector<double> mass;                   // trapezoid of p(t_k, .) in x
  double min_value = 0.0;                     // over every computed node
  double max_value = 0.0;
  double f_sup = 0.0;                         // sup norm of the initial data f_eps

  double at(int k, int i) const {
    return (*values)[static_cast<std::size_t>(k) * xgrid.n_nodes() + i];
  }
};

struct SolveOptions {
  // Neumann test hook: forces the Robin coefficient to 0 (zero-flux wall).
  bool zero_robin = false;
  // store the full field: automatic keeps it when the matrix has at most
  // 2^24 entries; on/off force the choice.
  enum class Store { automatic, on, off };
  Store store = Store::automatic;
};

// One implicit-Euler sweep machine for
//   d_t p = 1/2 d_xx p + Lam' d_x p,   d_x p(.,0) = (alpha/eps - 2 Lam') p(.,0),
//   p(., x_max) = 0,
// with centered diffusion, forward-difference upwinding of the (leftward)
// advection, and the Robin condition closed through a ghost node eliminated
// against the centered stencil at node 0.  Lam' is piecewise constant per
// step.  The system matrix is an M-matrix for any dt, dx when the Robin
// coefficient is nonnegative, which yields the discrete maximum principle
// 0 <= p <= max initial value up to roundoff.
class RobinStepper {
 public:
  RobinStepper(const MollifiedDensity& f_eps, const ModelParams& params, const TimeGrid& tgrid,
               const SpaceGrid& xgrid, bool zero_robin = false);

  std::vector<double> initial_state() const;  // f_eps sampled at the space nodes

  // Advances p in place from node k0 to k1 under boundary values lam
  // (indexed on the full grid); on_node(k, p) fires after each completed step.
  void advance(std::vector<double>& p, int k0, int k1, const double* lam,
               const std::function<void(int, const std::vector<double>&)>& on_node = {}) const;

  const TimeGrid& tgrid() const { return tgrid_; }
  const SpaceGrid& xgrid() const { return xgrid_; }
  double f_sup() const { return f_sup_; }

 private:
  TimeGrid tgrid_;
  SpaceGrid xgrid_;
  double alpha_, epsilon_, f_sup_;
  bool zero_robin_;
  std::vector<double> p0_;

  struct Factorization {
    double lam_prime = -1.0;
    bool valid = false;
    std::vector<double> upper_ratio;  // Thomas forward-sweep coefficients
    std::vector<double> inv_diag;
  };
  mutable Factorization fact_;

  void refactor(double lam_prime) const;
};

// Full solve on the grid of `lambda`.  Validates the model, the Lipschitz
// precondition on lambda (Robin coefficient must stay nonnegative), and the
// domain truncation x_max > support of f_eps.
DensityField solve_robin_pde(const MollifiedDensity& f_eps, const BoundaryPath& lambda,
                             const ModelParams& params, const SpaceGrid& xgrid,
                             const SolveOptions& options = {});

// F(t_k) = (1/eps) * trapezoid of the boundary trace up to t_k; non-decreasing
// with Lipschitz bound f_sup/eps.
BoundaryPath evaluate_F_pde(const DensityField& field, const ModelParams& params);

// r(t_k) = |mass_k + (alpha/2) F(t_k) - 1|: the discrete form of the statement
// that PDE mass plus accumulated boundary flux is conserved.
std::vector<double> mass_identity_residual(const DensityField& field, const BoundaryPath& F,
                                           const ModelParams& params);

}  // namespace stefan::pde
