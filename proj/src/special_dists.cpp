#include "jscc/special_dists.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace jscc::dists {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kSqrt1_2 = 0.7071067811865476;

double phi_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double phi_cdf(double x) { return 0.5 * std::erfc(-x * kSqrt1_2); }

double norm_quantile(double eps) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * eps);
}

// log Phi(x) with a Mills-ratio tail below the erfc underflow region.
double log_phi(double x) {
  if (x < -34.0) {
    double x2 = x * x;
    return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * M_PI) +
           std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
  }
  return std::log(phi_cdf(x));
}

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

// Adaptive Gauss-Kronrod over [a, b] with extra split points; the split at
// the branch switch keeps every panel smooth.
template <class F>
double integrate(const F& f, double a, double b,
                 const std::vector<double>& knots) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts{a, b};
  for (double k : knots) {
    if (k > a && k < b) pts.push_back(k);
  }
  std::sort(pts.begin(), pts.end());
  double total = 0, err_total = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    double err = 0;
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, pts[i], pts[i + 1], 12, 1e-12, &err);
    err_total += err;
  }
  if (!std::isfinite(total) || err_total > 1e-10) {
    std::ostringstream os;
    os << "quadrature error estimate " << err_total
       << " exceeds the 1e-10 budget";
    throw QuadratureFailureError(os.str());
  }
  return total;
}

void check_switched(const SwitchedConvSpec& s) {
  if (!(s.v1 > 0) || !std::isfinite(s.v1)) {
    throw DomainError("switched convolution needs finite v1 > 0");
  }
  if (!(s.v2 >= 0) || !(s.v3 >= 0) || std::isnan(s.v2) || std::isnan(s.v3)) {
    throw DomainError("switched convolution needs v2, v3 >= 0");
  }
}

void check_eps(double eps) {
  if (!(eps > 0) || !(eps < 1)) {
    std::ostringstream os;
    os << "probability argument " << eps << " must lie in (0, 1)";
    throw DomainError(os.str());
  }
}

}  // namespace

double gaussian_cdf(double v, double r) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw DomainError("gaussian_cdf needs finite variance v > 0");
  }
  if (std::isnan(r)) throw DomainError("gaussian_cdf at NaN");
  return phi_cdf(r / std::sqrt(v));
}

double gaussian_quantile(double v, double eps) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw DomainError("gaussian_quantile needs finite variance v > 0");
  }
  check_eps(eps);
  return std::sqrt(v) * norm_quantile(eps);
}

double switched_cdf(const SwitchedConvSpec& spec, double r) {
  check_switched(spec);
  if (std::isnan(r)) throw DomainError("switched_cdf at NaN");
  const double v1 = spec.v1;
  const double vp = std::max(spec.v2, spec.v3);
  const double vm = std::min(spec.v2, spec.v3);
  if (vp == 0) return gaussian_cdf(v1, r);  // both branches degenerate

  const double s1 = std::sqrt(v1);
  const double lim = 10.0 * s1;  // discarded Gaussian tail mass < 8e-24

  // y <= r, branch argument r - y >= 0, wide branch variance applies.
  double piece1 = 0;
  if (std::isinf(vp)) {
    piece1 = 0.5 * phi_cdf(r / s1);
  } else if (r >= -lim) {
    double sp = std::sqrt(vp);
    auto f = [&](double y) {
      return phi_pdf(y / s1) / s1 * phi_cdf((r - y) / sp);
    };
    piece1 = integrate(f, -lim, std::min(r, lim), {0.0});
  }

  // y >= r, branch argument r - y <= 0, narrow branch variance applies.
  double piece2 = 0;
  if (vm == 0) {
    piece2 = 0;
  } else if (std::isinf(vm)) {
    piece2 = 0.5 * (1.0 - phi_cdf(r / s1));
  } else if (r <= lim) {
    double sm = std::sqrt(vm);
    auto f = [&](double y) {
      return phi_pdf(y / s1) / s1 * phi_cdf((r - y) / sm);
    };
    piece2 = integrate(f, std::max(r, -lim), lim, {0.0});
  }
  return clamp01(piece1 + piece2);
}

double switched_density(const SwitchedConvSpec& spec, double x) {
  check_switched(spec);
  if (std::isnan(x)) throw DomainError("switched_density at NaN");
  const double v1 = spec.v1;
  const double vp = std::max(spec.v2, spec.v3);
  const double vm = std::min(spec.v2, spec.v3);
  const double s1 = std::sqrt(v1);
  const double lim = 10.0 * s1;

  double dens = 0;
  if (vp == 0) {
    dens += 0.5 * phi_pdf(x / s1) / s1;
  } else if (!std::isinf(vp) && x >= -lim) {
    double sp = std::sqrt(vp);
    // Gaussian product peaks at the conditional mean.
    double peak = x * v1 / (v1 + vp);
    auto f = [&](double y) {
      return phi_pdf(y / s1) / s1 * phi_pdf((x - y) / sp) / sp;
    };
    dens += integrate(f, -lim, std::min(x, lim), {0.0, peak});
  }
  if (vm == 0) {
    dens += 0.5 * phi_pdf(x / s1) / s1;
  } else if (!std::isinf(vm) && x <= lim) {
    double sm = std::sqrt(vm);
    double peak = x * v1 / (v1 + vm);
    auto f = [&](double y) {
      return phi_pdf(y / s1) / s1 * phi_pdf((x - y) / sm) / sm;
    };
    dens += integrate(f, std::max(x, -lim), lim, {0.0, peak});
  }
  return dens;
}

double switched_quantile(const SwitchedConvSpec& spec, double eps) {
  check_switched(spec);
  check_eps(eps);
  const double vp = std::max(spec.v2, spec.v3);
  const double vm = std::min(spec.v2, spec.v3);
  if (std::isinf(vp) && eps >= 0.5 - 1e-14) {
    throw DomainError(
        "switched CDF with an unbounded branch saturates at 1/2; quantile "
        "undefined for eps >= 1/2");
  }
  double vref = spec.v1;
  if (std::isfinite(vp)) {
    vref += vp;
  } else if (std::isfinite(vm) && vm > 0) {
    vref += vm;
  }
  double scale = std::sqrt(vref);
  double lo = -4.0 * scale - 1.0, hi = 4.0 * scale + 1.0;
  double grow = 4.0 * scale + 1.0;
  for (int i = 0; switched_cdf(spec, lo) > eps; ++i) {
    lo -= grow;
    grow *= 2;
    if (i > 200) throw NonConvergenceError("quantile bracket failed (low)");
  }
  grow = 4.0 * scale + 1.0;
  for (int i = 0; switched_cdf(spec, hi) < eps; ++i) {
    hi += grow;
    grow *= 2;
    if (i > 200) throw NonConvergenceError("quantile bracket failed (high)");
  }
  while (hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi))) {
    double mid = 0.5 * (lo + hi);
    if (switched_cdf(spec, mid) < eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double out = 0.5 * (lo + hi);
  if (std::abs(switched_cdf(spec, out) - eps) > 1e-9) {
    throw NonConvergenceError("quantile refinement missed the 1e-9 target");
  }
  return out;
}

namespace {

void check_star(const StarProductSpec& s) {
  if (!(s.v1 >= 0) || !std::isfinite(s.v1) || !(s.v2 >= 0) ||
      !std::isfinite(s.v2)) {
    throw DomainError("star product needs finite v1 > 0 and v2 >= 0");
  }
}

// Golden-section maximizer on [a, b] for a unimodal objective.
template <class F>
double golden_max(const F& f, double a, double b, double tol) {
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double star_cdf(const StarProductSpec& spec, double r) {
  check_star(spec);
  if (std::isnan(r)) throw DomainError("star_cdf at NaN");
  if (spec.v1 == 0 && spec.v2 == 0) return r >= 0 ? 1.0 : 0.0;
  if (spec.v1 == 0) return gaussian_cdf(spec.v2, r);
  if (spec.v2 == 0) return gaussian_cdf(spec.v1, r);
  const double s1 = std::sqrt(spec.v1);
  const double s2 = std::sqrt(spec.v2);

  // 1 - F(R) = max_a Phi(-a/s1) * Phi((a-R)/s2); the log objective is a sum
  // of two log-concave terms, hence strictly concave with one maximizer.
  auto lg = [&](double a) {
    return log_phi(-a / s1) + log_phi((a - r) / s2);
  };
  double span = 12.0 * std::sqrt(spec.v1 + spec.v2) + 1.0;
  double lo = std::min(0.0, r) - span;
  double hi = std::max(0.0, r) + span;
  const int kGrid = 512;
  double best = lo;
  double best_val = -std::numeric_limits<double>::infinity();
  double step = (hi - lo) / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i) {
    double a = lo + i * step;
    double val = lg(a);
    if (val > best_val) {
      best_val = val;
      best = a;
    }
  }
  double a_star = golden_max(lg, std::max(lo, best - step),
                             std::min(hi, best + step),
                             1e-11 * (1.0 + std::abs(best)));
  double refined = lg(a_star);
  if (refined < best_val - 1e-12) {
    throw OptimizationFailureError(
        "golden-section refinement fell below the coarse-grid optimum");
  }
  return clamp01(-std::expm1(std::max(refined, best_val)));
}

StarSplit star_quantile_split(const StarProductSpec& spec, double eps) {
  check_star(spec);
  check_eps(eps);
  if (spec.v1 == 0 && spec.v2 == 0) {
    throw DomainError("star quantile undefined for a doubly degenerate spec");
  }
  if (spec.v1 == 0) return {gaussian_quantile(spec.v2, eps), 0.0, eps};
  if (spec.v2 == 0) return {gaussian_quantile(spec.v1, eps), eps, 0.0};
  const double s1 = std::sqrt(spec.v1);
  const double s2 = std::sqrt(spec.v2);

  // eps_s = eps * sigmoid(u); the companion eps_c keeps eps_s * eps_c = eps
  // under the a*b = a+b-ab composition. The complement sigmoid(-u) is
  // evaluated on its own so neither share can round to an exact zero at the
  // ends of the u range.
  auto split_at = [&](double u) {
    double s = 1.0 / (1.0 + std::exp(-u));
    double sc = 1.0 / (1.0 + std::exp(u));
    double es = eps * s;
    double ec = eps * sc / (1.0 - eps + eps * sc);
    return std::pair<double, double>{es, ec};
  };
  auto h = [&](double u) {
    auto [es, ec] = split_at(u);
    return s1 * norm_quantile(es) + s2 * norm_quantile(ec);
  };
  const int kGrid = 512;
  const double lo = -45.0, hi = 45.0;
  double step = (hi - lo) / (kGrid - 1);
  double best = lo;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    double u = lo + i * step;
    double val = h(u);
    if (val > best_val) {
      best_val = val;
      best = u;
    }
  }
  double u_star = golden_max(h, std::max(lo, best - step),
                             std::min(hi, best + step), 1e-12 * 90.0);
  if (h(u_star) < best_val) u_star = best;
  auto [es, ec] = split_at(u_star);
  return {h(u_star), es, ec};
}

double star_quantile(const StarProductSpec& spec, double eps) {
  return star_quantile_split(spec, eps).quantile;
}

SandwichBounds sandwich_bounds(double v1, double v2, double r) {
  if (!(v1 >= 0) || !(v2 >= 0) || !(v1 + v2 > 0)) {
    throw DomainError("sandwich_bounds needs v1, v2 >= 0 with v1 + v2 > 0");
  }
  double lower = gaussian_cdf(v1 + v2, r);
  double wide = gaussian_cdf(2.0 * (v1 + v2), r);
  return {lower, 2.0 * wide - wide * wide};
}

double separation_quantile_floor(double eps) {
  check_eps(eps);
  // 1 - sqrt(1 - eps), carefully for small eps.
  double t = -std::expm1(0.5 * std::log1p(-eps));
  return std::sqrt(2.0) * norm_quantile(t);
}

}  // namespace jscc::dists
