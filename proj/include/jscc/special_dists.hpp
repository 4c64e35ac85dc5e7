#pragma once

#include "jscc/errors.hpp"

namespace jscc::dists {

// CDF of a centered Gaussian with variance v > 0, evaluated at r.
double gaussian_cdf(double v, double r);

// Inverse of gaussian_cdf in r for eps in (0, 1).
double gaussian_quantile(double v, double eps);

// Variance triple for the switched Gaussian convolution
//   Psi(R) = integral phi_{v1}(y) * min{Phi_{v2}(R-y), Phi_{v3}(R-y)} dy.
// v1 > 0; v2, v3 >= 0 and may be +infinity (the wide-branch limit, where the
// CDF saturates at 1/2 as R -> +inf). A zero branch variance acts as the
// step function Phi_0(t) = 1{t >= 0}.
struct SwitchedConvSpec {
  double v1 = 1;
  double v2 = 1;
  double v3 = 1;
};

// Density of the switched convolution (finite branch variances; a zero
// branch contributes the boundary term phi_{v1}(x)/2).
double switched_density(const SwitchedConvSpec& spec, double x);

// CDF of the switched convolution; adaptive quadrature with panels split at
// the branch switch y = R, absolute accuracy ~1e-10.
double switched_cdf(const SwitchedConvSpec& spec, double r);

// Inverse of switched_cdf by bracketed bisection; |Psi(result) - eps| <= 1e-9.
double switched_quantile(const SwitchedConvSpec& spec, double eps);

// Variance pair for the star-product distribution
//   F(R) = min_a Phi_{v1}(a) * Phi_{v2}(R - a),   p * q = p + q - p q.
// v1 > 0, v2 >= 0 (v2 = 0 degenerates to Phi_{v1}).
struct StarProductSpec {
  double v1 = 1;
  double v2 = 1;
};

// CDF of the star product. The inner objective is strictly log-concave in a,
// so a coarse grid plus golden-section refinement finds the global minimum;
// the refinement is asserted to improve on the grid value.
double star_cdf(const StarProductSpec& spec, double r);

// Inverse of star_cdf via its dual form: maximize
//   sqrt(v1) Q(eps_s) + sqrt(v2) Q(eps_c)  over  eps = eps_s * eps_c,
// where Q is the standard normal quantile and eps_c = (eps-eps_s)/(1-eps_s).
double star_quantile(const StarProductSpec& spec, double eps);

struct StarSplit {
  double quantile = 0;
  double eps_source = 0;
  double eps_channel = 0;
};

// Same optimization, also reporting the maximizing split of eps.
StarSplit star_quantile_split(const StarProductSpec& spec, double eps);

struct SandwichBounds {
  double lower = 0;  // Phi_{v1+v2}(r)
  double upper = 0;  // 2 Phi_{2(v1+v2)}(r) - Phi_{2(v1+v2)}(r)^2
};

// Two-sided envelope of the star-product CDF; the upper expression bounds it
// for r <= 0 (it is reported for all r, callers pick the valid regime).
SandwichBounds sandwich_bounds(double v1, double v2, double r);

// Universal floor for the normalized star-product quantile:
//   sqrt(2) * Q(1 - sqrt(1 - eps)),
// i.e. star_quantile(spec, eps) / sqrt(v1 + v2) is never below this.
double separation_quantile_floor(double eps);

}  // namespace jscc::dists
