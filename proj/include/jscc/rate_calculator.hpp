#pragma once

#include "jscc/errors.hpp"

namespace jscc::rates {

// Entropy rate and varentropy rate of the message process, in nats.
struct SourceSummary {
  double entropy = 0;
  double varentropy = 0;
};

enum class ChannelKind { conditional_additive, dmc };

// Channel capacity plus its dispersion description: a conditional-additive
// channel has a single dispersion v_c; a general DMC carries the extremes
// (v_minus, v_plus) over capacity-achieving inputs.
struct ChannelSummary {
  ChannelKind kind = ChannelKind::conditional_additive;
  double capacity = 0;
  double v_c = 0;
  double v_plus = 0;
  double v_minus = 0;
};

struct RateProblem {
  SourceSummary source;
  ChannelSummary channel;

  // (C/H) * V_s, the source contribution to the second-order variance when
  // k ~ (C/H) n message symbols ride on n channel uses.
  double source_term() const;
};

// Second-order error curves against the rate offset r (nats/sqrt(n)).
// Conditional-additive: exact Gaussian.
double joint_ca_error(const RateProblem& p, double r);
// General DMC: switched Gaussian convolution over the dispersion extremes.
double joint_dmc_error(const RateProblem& p, double r);
// Dispatch on the channel kind.
double joint_error(const RateProblem& p, double r);

// Single-Gaussian surrogate: variance source_term + v_minus for r <= 0,
// source_term + v_plus for r > 0. Upper-bounds the exact curve.
double kv_bound(const RateProblem& p, double r);

// Guaranteed ceiling for kv_bound / joint error: 2 on r < 0,
// 1/Phi_{source_term}(r) on r >= 0 (both branches equal 2 at r = 0).
double kv_ratio_upper(const RateProblem& p, double r);

// Separation-scheme curves: star product of the source and channel parts.
double sep_ca_error(const RateProblem& p, double r);
double sep_dmc_error(const RateProblem& p, double r);
double sep_error(const RateProblem& p, double r);

// Ceiling for sep error / kv_bound, from the sandwich envelope evaluated at
// the normalized offset r_* = r / sqrt(source_term + v_branch).
double sep_kv_ratio_upper(const RateProblem& p, double r);

struct RatioBounds {
  double lower = 1;
  double upper = 1;
};

// Two-sided bounds for sep error / joint error. The r >= 0 branch needs
// source_term > 0 (DegenerateSourceError otherwise).
RatioBounds sep_joint_ratio_bounds(const RateProblem& p, double r);

enum class Scheme { joint, separation };

// Message-block expansion k(n, eps) = (n C + sqrt(n) q(eps)) / H where q is
// the eps-quantile of the scheme's second-order law. Returned as a real.
double k_expansion(const RateProblem& p, double n, double eps, Scheme scheme);

}  // namespace jscc::rates
