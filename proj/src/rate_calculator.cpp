#include "jscc/rate_calculator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jscc/special_dists.hpp"

namespace jscc::rates {

namespace {

void check_problem(const RateProblem& p) {
  const auto& s = p.source;
  const auto& c = p.channel;
  if (!std::isfinite(s.entropy) || !std::isfinite(s.varentropy) ||
      s.varentropy < 0) {
    std::ostringstream os;
    os << "source summary invalid: entropy " << s.entropy << ", varentropy "
       << s.varentropy;
    throw DomainError(os.str());
  }
  if (!std::isfinite(c.capacity) || c.capacity < 0) {
    std::ostringstream os;
    os << "channel capacity " << c.capacity << " must be finite and >= 0";
    throw DomainError(os.str());
  }
  if (c.kind == ChannelKind::conditional_additive) {
    if (!std::isfinite(c.v_c) || c.v_c < 0) {
      throw DomainError("conditional-additive channel needs finite v_c >= 0");
    }
  } else {
    if (!std::isfinite(c.v_plus) || !std::isfinite(c.v_minus) ||
        c.v_minus < 0 || c.v_plus < c.v_minus) {
      std::ostringstream os;
      os << "dispersion extremes invalid: v_minus " << c.v_minus
         << ", v_plus " << c.v_plus;
      throw DomainError(os.str());
    }
  }
}

void check_kind(const RateProblem& p, ChannelKind want, const char* op) {
  if (p.channel.kind != want) {
    std::ostringstream os;
    os << op << " expects a "
       << (want == ChannelKind::dmc ? "dmc" : "conditional_additive")
       << " channel";
    throw KindMismatchError(os.str());
  }
}

// Dispersion extremes seen through a kind-agnostic lens: a conditional
// additive channel has v_minus = v_plus = v_c.
void branch_variances(const RateProblem& p, double* vm, double* vp) {
  if (p.channel.kind == ChannelKind::conditional_additive) {
    *vm = p.channel.v_c;
    *vp = p.channel.v_c;
  } else {
    *vm = p.channel.v_minus;
    *vp = p.channel.v_plus;
  }
}

// Gaussian CDF extended to the degenerate endpoints: variance 0 is the unit
// step at the origin, variance +inf is the constant 1/2.
double cdf_ext(double v, double t) {
  if (v == 0) return t >= 0 ? 1.0 : 0.0;
  if (std::isinf(v)) return 0.5;
  return dists::gaussian_cdf(v, t);
}

double std_phi(double x) { return cdf_ext(1.0, x); }

void check_eps_arg(double eps) {
  if (!(eps > 0) || !(eps < 1)) {
    std::ostringstream os;
    os << "target error " << eps << " must lie in (0, 1)";
    throw DomainError(os.str());
  }
}

}  // namespace

double RateProblem::source_term() const {
  if (!(source.entropy > 0) || !std::isfinite(source.entropy)) {
    std::ostringstream os;
    os << "source entropy rate " << source.entropy << " must be positive";
    throw DomainError(os.str());
  }
  return channel.capacity / source.entropy * source.varentropy;
}

double joint_ca_error(const RateProblem& p, double r) {
  check_problem(p);
  check_kind(p, ChannelKind::conditional_additive, "joint_ca_error");
  return cdf_ext(p.source_term() + p.channel.v_c, r);
}

double joint_dmc_error(const RateProblem& p, double r) {
  check_problem(p);
  check_kind(p, ChannelKind::dmc, "joint_dmc_error");
  const double st = p.source_term();
  if (st == 0) {
    // Mixture limit: the law's CDF is the pointwise min of the two branches.
    return std::min(cdf_ext(p.channel.v_minus, r),
                    cdf_ext(p.channel.v_plus, r));
  }
  return dists::switched_cdf({st, p.channel.v_plus, p.channel.v_minus}, r);
}

double joint_error(const RateProblem& p, double r) {
  return p.channel.kind == ChannelKind::dmc ? joint_dmc_error(p, r)
                                            : joint_ca_error(p, r);
}

double kv_bound(const RateProblem& p, double r) {
  check_problem(p);
  double vm, vp;
  branch_variances(p, &vm, &vp);
  const double st = p.source_term();
  return cdf_ext(st + (r <= 0 ? vm : vp), r);
}

double kv_ratio_upper(const RateProblem& p, double r) {
  check_problem(p);
  if (r < 0) return 2.0;
  const double st = p.source_term();
  if (st == 0) return 1.0;
  return 1.0 / dists::gaussian_cdf(st, r);
}

double sep_ca_error(const RateProblem& p, double r) {
  check_problem(p);
  check_kind(p, ChannelKind::conditional_additive, "sep_ca_error");
  return dists::star_cdf({p.source_term(), p.channel.v_c}, r);
}

double sep_dmc_error(const RateProblem& p, double r) {
  check_problem(p);
  check_kind(p, ChannelKind::dmc, "sep_dmc_error");
  const double st = p.source_term();
  return std::min(dists::star_cdf({st, p.channel.v_plus}, r),
                  dists::star_cdf({st, p.channel.v_minus}, r));
}

double sep_error(const RateProblem& p, double r) {
  return p.channel.kind == ChannelKind::dmc ? sep_dmc_error(p, r)
                                            : sep_ca_error(p, r);
}

// Ceiling for min-star-cdf / branch-gaussian-cdf at offset r.  The star cdf
// with arm variances (st, v) is capped by its envelope 2*G - G^2 where
// G = Phi_{2(st+v)}, so the ratio against Phi_{st+v} is
// (2*Phi(rs/sqrt2) - Phi(rs/sqrt2)^2) / Phi(rs) with rs = r/sqrt(st+v).
// The cap is attained exactly when v_plus == v_minus == st; it diverges as
// r -> -inf because the envelope's tail is twice as heavy.
double sep_kv_ratio_upper(const RateProblem& p, double r) {
  check_problem(p);
  double vm, vp;
  branch_variances(p, &vm, &vp);
  const double st = p.source_term();
  if (r == 0) return 1.5;
  const double v = st + (r <= 0 ? vm : vp);
  if (v == 0) {
    // Point mass on both curves: the cap collapses for r > 0 and blows up
    // below zero, matching the v -> 0 limit of the generic expression.
    return r > 0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  const double rs = r / std::sqrt(v);
  const double y = std_phi(rs);
  if (y == 0) return std::numeric_limits<double>::infinity();
  const double x = std_phi(rs / std::sqrt(2.0));
  return (2.0 * x - x * x) / y;
}

// Separation vs exact-joint error ratio window: the upper edge composes the
// star/gaussian cap above with the gaussian/switched cap (2 below zero,
// 1/Phi_{st}(r) at or above).
RatioBounds sep_joint_ratio_bounds(const RateProblem& p, double r) {
  check_problem(p);
  double vm, vp;
  branch_variances(p, &vm, &vp);
  const double st = p.source_term();
  RatioBounds out;
  out.lower = 1.0;
  if (r < 0) {
    const double v = st + vm;
    if (v == 0) {
      out.upper = std::numeric_limits<double>::infinity();
      return out;
    }
    const double rs = r / std::sqrt(v);
    const double y = std_phi(rs);
    if (y == 0) {
      out.upper = std::numeric_limits<double>::infinity();
      return out;
    }
    const double x = std_phi(rs / std::sqrt(2.0));
    out.upper = 2.0 * (2.0 * x - x * x) / y;
    return out;
  }
  if (st == 0) {
    throw DegenerateSourceError(
        "separation/joint ratio ceiling needs a dispersive source when the "
        "rate offset is nonnegative");
  }
  const double a = std_phi(r / std::sqrt(st));
  const double rs = r / std::sqrt(st + vp);
  const double x = std_phi(rs / std::sqrt(2.0));
  const double y = std_phi(rs);
  out.upper = (2.0 * x - x * x) / (a * y);
  return out;
}

double k_expansion(const RateProblem& p, double n, double eps, Scheme scheme) {
  check_problem(p);
  check_eps_arg(eps);
  if (!(n > 0) || !std::isfinite(n)) {
    std::ostringstream os;
    os << "blocklength " << n << " must be positive";
    throw DomainError(os.str());
  }
  const double st = p.source_term();
  const bool dmc = p.channel.kind == ChannelKind::dmc;
  double vm, vp;
  branch_variances(p, &vm, &vp);

  double q = 0;
  if (scheme == Scheme::joint) {
    if (!dmc || vm == vp) {
      const double v = st + vp;
      q = v > 0 ? dists::gaussian_quantile(v, eps) : 0.0;
    } else if (st == 0) {
      // Quantile of the min-CDF mixture: the narrow branch rules eps < 1/2,
      // the wide branch rules eps > 1/2, and both meet at zero.
      const double v = eps < 0.5 ? vm : vp;
      q = v > 0 ? dists::gaussian_quantile(v, eps) : 0.0;
    } else {
      q = dists::switched_quantile({st, vp, vm}, eps);
    }
  } else {
    if (st == 0 && vm == 0 && vp == 0) {
      q = 0.0;
    } else if (!dmc || vm == vp) {
      q = dists::star_quantile({st, vp}, eps);
    } else {
      q = std::max(dists::star_quantile({st, vp}, eps),
                   dists::star_quantile({st, vm}, eps));
    }
  }
  const double h = p.source.entropy;
  if (!(h > 0)) throw DomainError("k_expansion needs positive source entropy");
  return (n * p.channel.capacity + std::sqrt(n) * q) / h;
}

}  // namespace jscc::rates
