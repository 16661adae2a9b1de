#pragma once

#include "stefan/density.hpp"

namespace stefan {

// Latent-heat density alpha and kinetic-undercooling parameter epsilon.
// epsilon = 0 selects the unregularized limit problem.
struct ModelParams {
  double alpha = 1.0;
  double epsilon = 0.0;
};

// Admissibility gate shared by every solver entry point: f >= 0, unit mass
// (tol 1e-12), and the strict subcritical bound sup f < alpha/2 that the
// uniqueness of the limit problem requires.  Throws Error naming the violated
// condition (NegativeDensity, NotNormalized, SupercriticalSupNorm,
// NonPositiveEpsilon, PreconditionFailed).
void validate_model(const DensitySpec& f, const ModelParams& params);

// Sample from the law of f_eps through the coupled representation
//   X0 = Finv_f(u) + eps * Finv_rho(v),
// which is non-decreasing in eps for fixed (u, v); this makes ensembles with
// shared seeds pathwise comparable across eps.  u, v are clamped to
// [1e-15, 1-1e-15].  eps = 0 reduces to plain inverse-CDF sampling of f.
double sample_coupled_initial(const DensitySpec& f, double epsilon, double u, double v);

}  // namespace stefan
