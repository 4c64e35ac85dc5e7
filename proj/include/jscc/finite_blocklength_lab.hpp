#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "jscc/dmc_analysis.hpp"
#include "jscc/errors.hpp"
#include "jscc/markov_info.hpp"

namespace jscc::lab {

// One-shot transmission of a message M ~ p_m straight through a DMC.
// Kept deliberately tiny (|M| <= 8, |X| <= 4, |Y| <= 4) so the optimum
// over all encoders is enumerable.
struct SingleShotInstance {
  Eigen::VectorXd p_m;
  dmc::DmcChannel channel;
};

struct SingleShotCode {
  double error = 0;
  std::vector<int> encoder;  // message -> channel input
};

// Minimum error probability over every deterministic encoder, each paired
// with its optimal (maximum posterior) decoder:
//   min_e [ 1 - sum_y max_m p(m) W(y | e(m)) ].
// Throws TooLargeError beyond the enumeration caps.
double exact_single_shot(const SingleShotInstance& inst);
SingleShotCode exact_single_shot_code(const SingleShotInstance& inst);

// Random-coding achievability ceiling for the one-shot error at threshold
// c > 0 with input law p_x:
//   min{ 1, sum_{m,x,y} p(m) p(x) W(y|x) 1{p(m) p(x) W(y|x) <= c p(x) q(y)}
//           + 1/c },     q = p_x W.
double achievability_rhs(const SingleShotInstance& inst,
                         const Eigen::VectorXd& p_x, double c);

// Converse floor for a specific encoder against an arbitrary output law q_y:
//   sum_m p(m) sum_y W(y|e(m)) 1{p(m) W(y|e(m)) <= c q(y)}  -  c.
// Reported raw; it may be negative (then it is simply uninformative).
double converse_rhs(const SingleShotInstance& inst,
                    const std::vector<int>& encoder,
                    const Eigen::VectorXd& q_y, double c);

struct McEstimate {
  double value = 0;
  double half_width = 0;  // 1.96 * binomial standard error of the raw mean
};

struct BoundPair {
  McEstimate achievability;
  McEstimate converse;
};

// Monte Carlo bound pair for k source symbols carried over n uses of a
// conditional-additive channel with the given noise pair chain. Both bounds
// reuse the same sampled statistic
//   T = -log P(M^k) - log P(X^n | Z^n),
// tested against n log|X| -+ n^{1/4}; the achievability value adds the
// e^{-n^{1/4}} slack (clipped to 1), the converse subtracts it (clipped
// to 0).
BoundPair ca_bound_pair(const markov::TransitionMatrix& source,
                        const markov::NonHiddenChain& noise, int k, int n,
                        std::int64_t samples, std::uint64_t seed, int workers);

struct TwoRegimeResult {
  double value = 0;
  double half_width = 0;
  long long k = 0;  // message block length used
};

// Simulates the regime-switching scheme that realizes the switched-Gaussian
// error curve: k = round((C/H) n + (r/H) sqrt(n)); the encoder observes the
// source fluctuation S and transmits i.i.d. inputs drawn from the
// max-dispersion law when S <= r, the min-dispersion law otherwise. The
// estimate is P{ S - C_n <= r } with C_n the channel information fluctuation
// against the capacity saddle output.
TwoRegimeResult two_regime_estimate(const markov::TransitionMatrix& source,
                                    const dmc::DmcChannel& channel, double r,
                                    int n, std::int64_t samples,
                                    std::uint64_t seed, int workers);

// A concatenated code: source index alphabet {0..A-1} sits between a source
// code (enc: M -> A, dec: A -> M) and a channel code (enc: A -> X,
// dec: Y -> A).
struct SeparationScheme {
  Eigen::VectorXd p_m;
  std::vector<int> source_enc;
  std::vector<int> source_dec;
  dmc::DmcChannel channel;
  std::vector<int> channel_enc;
  std::vector<int> channel_dec;
};

struct SeparationCheck {
  double averaged = 0;   // end-to-end error averaged over all A! interleavers
  double product = 0;    // p_source + p_channel - p_source * p_channel
  double p_source = 0;
  double p_channel = 0;
};

// Verifies the interleaving identity: averaging the end-to-end error over
// every permutation of the index alphabet equals the error product of the
// two component codes. Requires the source code to be self-consistent
// (dec(j) = m implies enc(m) = j); throws DomainError otherwise, since the
// identity provably fails for inconsistent codes.
SeparationCheck separation_product_check(const SeparationScheme& scheme);

// Sorted samples of the normalized conditional information density
//   ( -log P(X^n | Z^n) - n H ) / sqrt(n)
// for empirical-law comparisons against the Gaussian limit.
std::vector<double> sample_info_density(const markov::NonHiddenChain& chain,
                                        int n, std::int64_t samples,
                                        std::uint64_t seed, int workers);

}  // namespace jscc::lab
