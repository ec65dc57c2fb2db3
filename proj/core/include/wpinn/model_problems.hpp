#pragma once

#include <vector>

#include "wpinn/pde_problem.hpp"

namespace wpinn {

/// Laplace equation on (0,1)^d with an exact eigenfunction-style solution
///   u(x) = e^{-omega1 x_1} * prod_{i=2..d} sin(omega_i x_i),
///   omega1 = sqrt(sum_{i>=2} omega_i^2),
/// Dirichlet data G = u.  `frequencies` holds omega_2..omega_d (d-1 values),
/// each a positive multiple of pi.  Closed-form p=2 magnitude bounds:
///   M_I = 2^{2-d} omega1^3 (1 - e^{-2 omega1}),
///   M_B = 2^{1-d} (1 + e^{-2 omega1}).
LinearPDEProblem laplace_eigen(int dim, const std::vector<double>& frequencies);

/// Poisson problem on the unit square with
///   u(x,y) = cos(omega x) sin(omega y),  F = -2 omega^2 cos(omega x) sin(omega y),
/// omega a positive multiple of pi, Dirichlet data G = u.  Closed-form p=2
/// bounds: M_I = omega^4, M_B = 1.
LinearPDEProblem poisson_eigen(double omega);

/// Poisson problem on the unit square whose solution carries a sharp peak:
///   u(x,y) = sin(pi x) + exp(-1000((x-1/2)^2 + (y-1/2)^2)) - 1/2,
/// F = laplacian of u, Dirichlet data G = u.  No closed-form bounds; the
/// optimal weight is estimated by Monte-Carlo.
LinearPDEProblem poisson_peak();

/// 1-D convection-diffusion two-point problem on [0,1]:
///   alpha u'' + v u' = 0,  u(0) = 1/2,  u(1) = -1/2,
/// exact solution u(x) = A + B e^{-v x / alpha} with B = 1/(1 - e^{-v/alpha})
/// and A = 1/2 - B.  With `paper_constant` the constant A = -1/2 from the
/// source text is used instead; that variant misses the boundary conditions
/// by ~e^{-v/alpha} and is kept only for comparison (no consistency check).
/// Closed-form p=2 bounds: M_I = (2 v^3/alpha) B^2 (1 - e^{-2v/alpha}),
/// M_B = u(0)^2 + u(1)^2.
LinearPDEProblem convection_diffusion(double v, double alpha, bool paper_constant = false);

}  // namespace wpinn
