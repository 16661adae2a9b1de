#pragma once

// Frozen expected values from independent reference computations:
//  - closed forms evaluated with 40-digit arithmetic (bump-kernel geometry,
//    reflection-principle laws of the Brownian running minimum, conditional
//    Laplace transforms),
//  - an independently written banded-solver implementation of the same
//    finite-difference scheme (small-grid solution pins),
//  - a converged run of that reference implementation on a refined grid
//    (dt = 2^-14, dx = 2^-12) for the fixed-point terminal value.
// None of these computations share code with the library.

namespace oracle {

// --- bump kernel rho(x) = C exp(-1/(x(1-x))) on (0,1) ---
inline constexpr double kKernelNormC = 142.25037577709587;     // 1 / integral of the bump
inline constexpr double kKernelPeak = 2.6054065145200277;      // C e^-4 at x = 1/2
inline constexpr double kKernelCdf04 = 0.25301828522971216;    // R(0.4)
inline constexpr double kKernelIntegralRaw = 0.0070298584066096562;

// --- mollified uniform(0,1) profile values ---
inline constexpr double kFeps_e025_x01 = 0.25301828522971216;  // = R(0.4)
inline constexpr double kFeps_e025_x11 = 0.74698171477028784;  // = 1 - R(0.4)
inline constexpr double kFeps_e05_x03 = 0.74698171477028784;   // = R(0.6)

// --- Brownian running-minimum laws (reflection principle) ---
// E[max(0, M - 1)], M = -min_{s<=1} B_s ~ |N(0,1)|
inline constexpr double kMeanRegulatorX0One = 0.1666309411753726;
// E[max(0, M - x0)], x0 ~ uniform(0,1)
inline constexpr double kMeanRegulatorUniform = 0.42466021665622925;
// E[max(0, M - x0)], x0 ~ mollified uniform(0,1) with eps = 0.5
inline constexpr double kMeanRegulatorMollifiedHalf = 0.28870419393516935;
// P(min_{s<=1}(x0 + B_s) <= 0), x0 ~ uniform(0,1)
inline constexpr double kHitProbByOne = 0.63125361962749276;

// --- first sweep of the limit-problem map at Lambda == 0, alpha = 3 ---
// (2/alpha) * integral_0^1 2 Phi(-x/sqrt(t)) dx
inline constexpr double kLimitFirstSweep025 = 0.26030105185640203;
inline constexpr double kLimitFirstSweep05 = 0.34262336125849604;
inline constexpr double kLimitFirstSweep1 = 0.42083574641832851;

// --- F_mc estimator at t = 1, Lambda == 0, alpha = 3, eps = 0.5 ---
// terms T = exp(-6 max(0, M - x0)), x0 ~ mollified uniform
inline constexpr double kExpTermMean = 0.61412731876677791;   // E[T]
inline constexpr double kExpTermSd = 0.4434564084417906;      // sd[T]
inline constexpr double kFmcAtOne = 0.2572484541554814;       // (2/3)(1 - E[T])
// 99% halfwidth predicted for 1e4 particles: 2.576 * (2/3) * sd / 100
inline constexpr double kCi99N1e4 = 0.0076156247209736839;

// --- small-grid solution pins from the independent banded-solver reference.
// Scenario: f = uniform(0,1), alpha = 3, eps = 0.5, t_max = 1, n_steps = 64,
// x_max = 4, n_cells = 128.  Tolerance 1e-8: the two implementations share
// the scheme but differ in kernel-CDF evaluation (adaptive quadrature vs
// tabulated) at ~1e-9.
// With boundary Lambda(t) = 0.3 t:
inline constexpr double kPinDriftTrace16 = 0.22033192872423377;   // p(0.25, 0)
inline constexpr double kPinDriftTrace32 = 0.16283967004912842;   // p(0.5, 0)
inline constexpr double kPinDriftTrace64 = 0.090520526360633666;  // p(1, 0)
inline constexpr double kPinDriftMid = 0.26459551766540723;       // p(1, 0.5)
inline constexpr double kPinDriftF64 = 0.31427205463081032;       // F(1)
inline constexpr double kPinDriftMass64 = 0.52166868392074761;    // mass at t=1
inline constexpr double kPinDriftMaxResid = 0.0069232341330369707;
// With Lambda == 0:
inline constexpr double kPinZeroTrace64 = 0.071863776956599096;
inline constexpr double kPinZeroF64 = 0.25500887037757092;
inline constexpr double kPinZeroMaxResid = 0.0045436159164073953;

// --- fixed point on the refined grid (dt = 2^-14, dx = 2^-12, tol = 1e-4,
// f = uniform(0,1), alpha = 3, eps = 0.5); main build must agree to 5e-4.
inline constexpr double kLambdaEpsHalfTerminalRefined = 0.33403083982614623;

}  // namespace oracle
