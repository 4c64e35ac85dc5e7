#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "jscc/finite_blocklength_lab.hpp"
#include "jscc/rng.hpp"
#include "oracles.hpp"

using namespace jscc;
using lab::SeparationScheme;
using lab::SingleShotInstance;
using markov::NonHiddenChain;
using markov::TransitionMatrix;

namespace {

dmc::DmcChannel bsc(double f) {
  Eigen::MatrixXd w(2, 2);
  w << 1 - f, f, f, 1 - f;
  return {w};
}

TransitionMatrix uniform_binary_source() {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return {m};
}

TransitionMatrix iid_binary_source(double p0) {
  Eigen::MatrixXd m(2, 2);
  m << p0, p0, 1 - p0, 1 - p0;
  return {m};
}

// Noise pair chain: Z i.i.d. uniform, X | Z Bernoulli with a z-dependent
// head probability. Every per-step conditional term is i.i.d., which makes
// the sampled statistic an exact i.i.d. sum.
NonHiddenChain conditional_noise(double p_given_z0, double p_given_z1) {
  Eigen::MatrixXd w(4, 4);
  const double px0[2] = {p_given_z0, p_given_z1};
  for (int s = 0; s < 4; ++s) {      // source pair state (x', z')
    for (int d = 0; d < 4; ++d) {    // destination pair state (x, z)
      const int xd = d / 2, zd = d % 2;
      w(d, s) = 0.5 * (xd == 0 ? px0[zd] : 1 - px0[zd]);
    }
  }
  return markov::check_non_hidden(TransitionMatrix{w}, 2, 2);
}

double single_shot_brute(const SingleShotInstance& inst) {
  const int nm = static_cast<int>(inst.p_m.size());
  const int nx = inst.channel.num_inputs();
  const int ny = inst.channel.num_outputs();
  std::vector<int> enc(nm, 0);
  double best = 1;
  for (;;) {
    double correct = 0;
    for (int y = 0; y < ny; ++y) {
      double top = 0;
      for (int m = 0; m < nm; ++m) {
        top = std::max(top, inst.p_m(m) * inst.channel.w(enc[m], y));
      }
      correct += top;
    }
    best = std::min(best, 1 - correct);
    int i = 0;
    while (i < nm && ++enc[i] == nx) enc[i++] = 0;
    if (i == nm) break;
  }
  return best;
}

}  // namespace

TEST_CASE("one-shot optimum: pins, ties, and exhaustive cross-check") {
  SingleShotInstance clean;
  clean.p_m = Eigen::VectorXd::Constant(4, 0.25);
  clean.channel = dmc::DmcChannel{Eigen::MatrixXd::Identity(4, 4)};
  CHECK(lab::exact_single_shot(clean) == doctest::Approx(0.0).epsilon(1e-14));

  // Skewed prior: dropping the unlikely message beats splitting inputs.
  SingleShotInstance skew;
  skew.p_m = Eigen::VectorXd(2);
  skew.p_m << 0.9, 0.1;
  skew.channel = bsc(0.25);
  const lab::SingleShotCode code = lab::exact_single_shot_code(skew);
  CHECK(code.error == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(lab::exact_single_shot(skew) == code.error);
  REQUIRE(code.encoder.size() == 2);
  // The witness encoder must reproduce the reported error.
  {
    double correct = 0;
    for (int y = 0; y < 2; ++y) {
      double top = 0;
      for (int m = 0; m < 2; ++m)
        top = std::max(top, skew.p_m(m) * skew.channel.w(code.encoder[m], y));
      correct += top;
    }
    CHECK(1 - correct == doctest::Approx(code.error).epsilon(1e-14));
  }

  SingleShotInstance unif;
  unif.p_m = Eigen::VectorXd::Constant(2, 0.5);
  unif.channel = bsc(0.25);
  CHECK(lab::exact_single_shot(unif) == doctest::Approx(0.25).epsilon(1e-13));

  std::mt19937_64 gen(5150);
  for (int trial = 0; trial < 20; ++trial) {
    SingleShotInstance inst;
    const int nm = 2 + static_cast<int>(gen() % 3);
    const int nx = 2 + static_cast<int>(gen() % 2);
    const int ny = 2 + static_cast<int>(gen() % 2);
    inst.p_m = oracle::random_simplex(gen, nm);
    inst.channel = dmc::DmcChannel{oracle::random_row_stochastic(gen, nx, ny)};
    CHECK(lab::exact_single_shot(inst) ==
          doctest::Approx(single_shot_brute(inst)).epsilon(1e-14));
  }

  SingleShotInstance big;
  big.p_m = Eigen::VectorXd::Constant(9, 1.0 / 9.0);
  big.channel = bsc(0.25);
  CHECK_THROWS_AS(lab::exact_single_shot(big), TooLargeError);
  big.p_m = Eigen::VectorXd::Constant(4, 0.25);
  big.channel = dmc::DmcChannel{oracle::random_row_stochastic(gen, 5, 2)};
  CHECK_THROWS_AS(lab::exact_single_shot(big), TooLargeError);
  big.channel = dmc::DmcChannel{oracle::random_row_stochastic(gen, 2, 5)};
  CHECK_THROWS_AS(lab::exact_single_shot(big), TooLargeError);
}

TEST_CASE("one-shot bounds bracket the exact optimum") {
  std::mt19937_64 gen(6006);

  // A huge threshold drives the achievability ceiling to its 1-clip.
  SingleShotInstance unif;
  unif.p_m = Eigen::VectorXd::Constant(2, 0.5);
  unif.channel = bsc(0.25);
  CHECK(lab::achievability_rhs(unif, Eigen::VectorXd::Constant(2, 0.5),
                               1e9) == doctest::Approx(1.0).epsilon(1e-9));

  // Thresholds at or above one make the converse vacuous.
  const lab::SingleShotCode opt = lab::exact_single_shot_code(unif);
  const Eigen::VectorXd q_unif = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(lab::converse_rhs(unif, opt.encoder, q_unif, 1.0) <= 0);
  CHECK(lab::converse_rhs(unif, opt.encoder, q_unif, 2.0) <= 0);

  for (int trial = 0; trial < 25; ++trial) {
    SingleShotInstance inst;
    const int nm = 2 + static_cast<int>(gen() % 3);
    const int nx = 2 + static_cast<int>(gen() % 2);
    const int ny = 2 + static_cast<int>(gen() % 2);
    inst.p_m = oracle::random_simplex(gen, nm);
    inst.channel = dmc::DmcChannel{oracle::random_row_stochastic(gen, nx, ny)};
    const lab::SingleShotCode code = lab::exact_single_shot_code(inst);

    for (double c : {2.0, 8.0, 32.0}) {
      for (int which = 0; which < 2; ++which) {
        const Eigen::VectorXd px =
            which == 0 ? Eigen::VectorXd::Constant(nx, 1.0 / nx)
                       : oracle::random_simplex(gen, nx);
        CHECK(lab::achievability_rhs(inst, px, c) >= code.error - 1e-12);
      }
    }
    for (double c : {1.0 / 32, 1.0 / 8, 0.5}) {
      // Induced output of the optimal code, and a uniform alternative.
      Eigen::VectorXd q_code = Eigen::VectorXd::Zero(ny);
      for (int m = 0; m < nm; ++m)
        q_code += inst.p_m(m) * inst.channel.w.row(code.encoder[m]).transpose();
      const Eigen::VectorXd q_flat = Eigen::VectorXd::Constant(ny, 1.0 / ny);
      CHECK(lab::converse_rhs(inst, code.encoder, q_code, c) <=
            code.error + 1e-12);
      CHECK(lab::converse_rhs(inst, code.encoder, q_flat, c) <=
            code.error + 1e-12);
    }
  }

  // Frozen triple-sum replicas of both bound formulas on a pinned instance.
  SingleShotInstance skew;
  skew.p_m = Eigen::VectorXd(2);
  skew.p_m << 0.9, 0.1;
  skew.channel = bsc(0.25);
  {
    const Eigen::VectorXd px = Eigen::VectorXd::Constant(2, 0.5);
    const double c = 4.0;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(2);
    for (int x = 0; x < 2; ++x) q += px(x) * skew.channel.w.row(x).transpose();
    double sum = 0;
    for (int m = 0; m < 2; ++m)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          const double joint = skew.p_m(m) * px(x) * skew.channel.w(x, y);
          if (skew.p_m(m) * px(x) * skew.channel.w(x, y) <=
              c * px(x) * q(y)) {
            sum += joint;
          }
        }
    const double expect = std::min(1.0, sum + 1.0 / c);
    CHECK(lab::achievability_rhs(skew, px, c) ==
          doctest::Approx(expect).epsilon(1e-14));
  }
  {
    const std::vector<int> enc{0, 0};
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(2, 0.5);
    const double c = 0.125;
    double sum = 0;
    for (int m = 0; m < 2; ++m)
      for (int y = 0; y < 2; ++y) {
        const double w = skew.channel.w(enc[m], y);
        if (skew.p_m(m) * w <= c * q(y)) sum += skew.p_m(m) * w;
      }
    CHECK(lab::converse_rhs(skew, enc, q, c) ==
          doctest::Approx(sum - c).epsilon(1e-14));
  }
}

TEST_CASE("blocklength bound pair: degenerate noise gives exact step values") {
  // One-state noise: the conditional term vanishes and T = k log 2 exactly,
  // compared against thresholds -+ n^{1/4} around n log 1 = 0 (n = 16).
  Eigen::MatrixXd one(1, 1);
  one << 1;
  const NonHiddenChain noise =
      markov::check_non_hidden(TransitionMatrix{one}, 1, 1);
  const double slack = std::exp(-2.0);  // n^{1/4} = 2

  // k = 2: T = 1.386 < 2, both indicators settle deterministically.
  const lab::BoundPair low =
      lab::ca_bound_pair(uniform_binary_source(), noise, 2, 16, 500, 7, 2);
  CHECK(low.achievability.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(low.converse.value == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(low.achievability.half_width == 0);
  CHECK(low.converse.half_width == 0);

  // k = 3: T = 2.079 crosses the upper threshold.
  const lab::BoundPair high =
      lab::ca_bound_pair(uniform_binary_source(), noise, 3, 16, 500, 7, 2);
  CHECK(high.converse.value == doctest::Approx(1.0 - slack).epsilon(1e-12));
  CHECK(high.achievability.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("blocklength bound pair: Monte Carlo against an independent replay") {
  const NonHiddenChain noise = conditional_noise(0.2, 0.35);
  const int k = 38, n = 256;

  const lab::BoundPair got = lab::ca_bound_pair(uniform_binary_source(),
                                                noise, k, n, 20000, 11, 4);
  CHECK(got.achievability.value >= got.converse.value);
  CHECK(got.achievability.half_width > 0);

  // Independent sampler for the same functional: T = k log2 + sum of i.i.d.
  // conditional terms, because Z is i.i.d. and X depends only on Z.
  std::mt19937_64 gen(321);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double vals[2][2] = {{-std::log(0.2), -std::log(0.8)},
                             {-std::log(0.35), -std::log(0.65)}};
  const long samples = 500000;
  // n^{1/4} = 256^{1/4} = 4.
  const double t_lo = n * std::log(2.0) - 4.0;
  const double t_hi = n * std::log(2.0) + 4.0;
  long above_lo = 0, above_hi = 0;
  for (long s = 0; s < samples; ++s) {
    double t = k * std::log(2.0);
    for (int i = 0; i < n; ++i) {
      const int z = u(gen) < 0.5 ? 0 : 1;
      const double p0 = z == 0 ? 0.2 : 0.35;
      t += vals[z][u(gen) < p0 ? 0 : 1];
    }
    if (t > t_lo) ++above_lo;
    if (t > t_hi) ++above_hi;
  }
  const double slack = std::exp(-4.0);
  const double ach_oracle =
      std::min(1.0, static_cast<double>(above_lo) / samples + slack);
  const double conv_oracle =
      std::max(0.0, static_cast<double>(above_hi) / samples - slack);
  const double hw_oracle = 1.96 * std::sqrt(0.25 / samples);

  CHECK(std::abs(got.achievability.value - ach_oracle) <
        4 * (got.achievability.half_width + hw_oracle));
  CHECK(std::abs(got.converse.value - conv_oracle) <
        4 * (got.converse.half_width + hw_oracle));

  // Bit-identical reproduction for a fixed (seed, workers) pair.
  for (int workers : {1, 4}) {
    const lab::BoundPair a = lab::ca_bound_pair(uniform_binary_source(),
                                                noise, k, n, 4000, 99, workers);
    const lab::BoundPair b = lab::ca_bound_pair(uniform_binary_source(),
                                                noise, k, n, 4000, 99, workers);
    CHECK(a.achievability.value == b.achievability.value);
    CHECK(a.converse.value == b.converse.value);
    CHECK(a.achievability.half_width == b.achievability.half_width);
  }
}

TEST_CASE("regime-switching estimate matches the Gaussian prediction") {
  const TransitionMatrix source = iid_binary_source(0.89);
  const dmc::DmcChannel channel = bsc(0.11);
  const double h = oracle::binary_entropy(0.11);
  const double v = oracle::bernoulli_varentropy(0.11);
  const double c = std::log(2.0) - h;
  const int n = 400;

  const double r = -0.5;
  const lab::TwoRegimeResult res =
      lab::two_regime_estimate(source, channel, r, n, 20000, 31, 4);
  CHECK(res.k == std::llround(c / h * n + r / h * std::sqrt(n)));

  // Equal dispersion extremes: plain Gaussian with the finite-k source term.
  const double var = static_cast<double>(res.k) * v / n + v;
  const double target = oracle::norm_cdf(r / std::sqrt(var));
  CHECK(std::abs(res.value - target) <
        std::max(0.02, 3 * res.half_width + 0.01));

  // Shared seed, increasing offset: estimates move together monotonically.
  double prev = -1;
  for (double rr : {-1.0, 0.0, 1.0}) {
    const lab::TwoRegimeResult step =
        lab::two_regime_estimate(source, channel, rr, n, 5000, 77, 1);
    CHECK(step.value >= prev);
    CHECK(step.value >= 0);
    CHECK(step.value <= 1);
    prev = step.value;
  }

  // Deep negative offset: essentially no errors.
  const lab::TwoRegimeResult deep =
      lab::two_regime_estimate(source, channel, -5, 400, 20000, 13, 2);
  CHECK(deep.value <= 0.005);

  // Offsets that drive k below one message symbol are rejected.
  CHECK_THROWS_AS(lab::two_regime_estimate(source, channel, -10, 16, 100, 1, 1),
                  DomainError);
}

TEST_CASE("regime-switching estimate selects the dispersion arm") {
  // Uniform source: the source fluctuation is exactly zero, so the estimate
  // becomes the pure channel tail under the arm picked by the offset sign.
  const TransitionMatrix source = uniform_binary_source();
  const dmc::DmcChannel gadget{oracle::level_set_channel(0.6)};
  const double vlo = oracle::shape_variance(oracle::h3_partner(0.6));
  const double vhi = oracle::shape_variance(0.6);
  const int n = 400;

  const lab::TwoRegimeResult neg =
      lab::two_regime_estimate(source, gadget, -0.5, n, 20000, 8, 4);
  const double t_neg = oracle::norm_cdf(-0.5 / std::sqrt(vlo));
  CHECK(std::abs(neg.value - t_neg) <
        std::max(0.02, 3 * neg.half_width + 0.01));

  const lab::TwoRegimeResult pos =
      lab::two_regime_estimate(source, gadget, 0.5, n, 20000, 8, 4);
  const double t_pos = oracle::norm_cdf(0.5 / std::sqrt(vhi));
  CHECK(std::abs(pos.value - t_pos) <
        std::max(0.02, 3 * pos.half_width + 0.01));

  // The two arms are far apart; confirm each estimate is on its own side.
  CHECK(neg.value < oracle::norm_cdf(-0.5 / std::sqrt(vhi)) + 0.04);
  CHECK(pos.value > oracle::norm_cdf(0.5 / std::sqrt(vlo)) - 0.04);
}

TEST_CASE("interleaver identity: worked example and brute-force average") {
  // Pinned example: ternary source squeezed to two indices, repetition code
  // over three channel bits.
  SeparationScheme s;
  s.p_m = Eigen::VectorXd(3);
  s.p_m << 0.5, 0.3, 0.2;
  s.source_enc = {0, 1, 1};
  s.source_dec = {0, 1};
  Eigen::MatrixXd w3(2, 8);
  const double f = 0.2;
  for (int y = 0; y < 8; ++y) {
    const int bits = ((y >> 2) & 1) + ((y >> 1) & 1) + (y & 1);
    w3(0, y) = std::pow(f, bits) * std::pow(1 - f, 3 - bits);
    w3(1, y) = std::pow(1 - f, bits) * std::pow(f, 3 - bits);
  }
  s.channel = dmc::DmcChannel{w3};
  s.channel_enc = {0, 1};
  s.channel_dec.resize(8);
  for (int y = 0; y < 8; ++y) {
    const int bits = ((y >> 2) & 1) + ((y >> 1) & 1) + (y & 1);
    s.channel_dec[y] = bits >= 2 ? 1 : 0;
  }

  const lab::SeparationCheck chk = lab::separation_product_check(s);
  CHECK(chk.p_source == doctest::Approx(0.2).epsilon(1e-14));
  const double pc = f * f * f + 3 * f * f * (1 - f);
  CHECK(chk.p_channel == doctest::Approx(pc).epsilon(1e-13));
  CHECK(chk.product ==
        doctest::Approx(0.2 + pc - 0.2 * pc).epsilon(1e-13));
  CHECK(chk.averaged == doctest::Approx(chk.product).epsilon(1e-12));

  // Lossless source half: end-to-end error is pure channel error.
  SeparationScheme lossless = s;
  lossless.p_m = Eigen::VectorXd(2);
  lossless.p_m << 0.6, 0.4;
  lossless.source_enc = {0, 1};
  lossless.source_dec = {0, 1};
  const lab::SeparationCheck l = lab::separation_product_check(lossless);
  CHECK(l.p_source == 0);
  CHECK(l.averaged == doctest::Approx(l.p_channel).epsilon(1e-13));

  // Noiseless channel half: end-to-end error is pure source error.
  SeparationScheme clean = s;
  clean.channel = dmc::DmcChannel{Eigen::MatrixXd::Identity(2, 2)};
  clean.channel_enc = {0, 1};
  clean.channel_dec = {0, 1};
  const lab::SeparationCheck c2 = lab::separation_product_check(clean);
  CHECK(c2.p_channel == 0);
  CHECK(c2.averaged == doctest::Approx(c2.p_source).epsilon(1e-13));

  // Inconsistent source code: the identity provably fails, so it is an error.
  SeparationScheme bad = s;
  bad.source_dec = {1, 0};
  CHECK_THROWS_AS(lab::separation_product_check(bad), DomainError);

  // Index alphabets beyond the factorial cap are rejected.
  SeparationScheme wide;
  wide.p_m = Eigen::VectorXd::Constant(5, 0.2);
  wide.source_enc = {0, 1, 2, 3, 4};
  wide.source_dec = {0, 1, 2, 3, 4};
  wide.channel = dmc::DmcChannel{Eigen::MatrixXd::Identity(5, 5)};
  wide.channel_enc = {0, 1, 2, 3, 4};
  wide.channel_dec = {0, 1, 2, 3, 4};
  CHECK_THROWS_AS(lab::separation_product_check(wide), TooLargeError);
}

TEST_CASE("interleaver identity: random schemes against direct enumeration") {
  std::mt19937_64 gen(777);
  for (int trial = 0; trial < 20; ++trial) {
    const int na = 3;
    const int nm = 4;
    const int ny = 3;
    SeparationScheme s;
    s.p_m = oracle::random_simplex(gen, nm);
    // Random surjective source encoder with a consistent decoder.
    s.source_enc.resize(nm);
    s.source_enc[0] = 0;
    s.source_enc[1] = 1;
    s.source_enc[2] = 2;
    s.source_enc[3] = static_cast<int>(gen() % na);
    s.source_dec.resize(na);
    for (int j = 0; j < na; ++j) {
      // Pick any preimage of j.
      std::vector<int> pre;
      for (int m = 0; m < nm; ++m)
        if (s.source_enc[m] == j) pre.push_back(m);
      s.source_dec[j] = pre[gen() % pre.size()];
    }
    s.channel = dmc::DmcChannel{oracle::random_row_stochastic(gen, na, ny)};
    s.channel_enc = {0, 1, 2};
    s.channel_dec.resize(ny);
    for (int y = 0; y < ny; ++y) s.channel_dec[y] = static_cast<int>(gen() % na);

    const lab::SeparationCheck chk = lab::separation_product_check(s);

    // Directly average the end-to-end error over all interleavers.
    std::vector<int> perm{0, 1, 2};
    double total = 0;
    int count = 0;
    do {
      std::vector<int> inv(na);
      for (int j = 0; j < na; ++j) inv[perm[j]] = j;
      double err = 0;
      for (int m = 0; m < nm; ++m) {
        const int x = s.channel_enc[perm[s.source_enc[m]]];
        for (int y = 0; y < ny; ++y) {
          const int mhat = s.source_dec[inv[s.channel_dec[y]]];
          if (mhat != m) err += s.p_m(m) * s.channel.w(x, y);
        }
      }
      total += err;
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(count == 6);
    CHECK(chk.averaged == doctest::Approx(total / count).epsilon(1e-12));
    CHECK(chk.product ==
          doctest::Approx(chk.p_source + chk.p_channel -
                          chk.p_source * chk.p_channel)
              .epsilon(1e-13));
    CHECK(std::abs(chk.averaged - chk.product) < 1e-12);
  }
}

TEST_CASE("normalized conditional information samples") {
  // Uniform i.i.d. source: every path has probability exactly 2^-n.
  const NonHiddenChain unif =
      markov::as_non_hidden(uniform_binary_source());
  const std::vector<double> zeros =
      lab::sample_info_density(unif, 64, 1000, 5, 2);
  REQUIRE(zeros.size() == 1000);
  // Only accumulated rounding separates each path from the mean.
  for (double z : zeros) CHECK(std::abs(z) < 1e-12);

  // Skewed i.i.d. source: empirical law approaches the Gaussian with the
  // Bernoulli varentropy (n large enough to quiet the lattice steps).
  const NonHiddenChain bern = markov::as_non_hidden(iid_binary_source(0.89));
  std::vector<double> s = lab::sample_info_density(bern, 4096, 20000, 42, 4);
  CHECK(std::is_sorted(s.begin(), s.end()));
  const double v = oracle::bernoulli_varentropy(0.11);
  const double ks = oracle::ks_distance(
      s, [&](double x) { return oracle::norm_cdf(x / std::sqrt(v)); });
  CHECK(ks < 0.03);

  // Conditional pair chain: same limit law with the conditional varentropy.
  const NonHiddenChain cond = conditional_noise(0.2, 0.35);
  const double vc = markov::varentropy_rate(cond);
  std::vector<double> t = lab::sample_info_density(cond, 1024, 20000, 43, 4);
  const double ks_c = oracle::ks_distance(
      t, [&](double x) { return oracle::norm_cdf(x / std::sqrt(vc)); });
  CHECK(ks_c < 0.025);

  // Same (seed, workers) reruns reproduce bit-identically.
  std::vector<double> again = lab::sample_info_density(cond, 1024, 20000, 43, 4);
  CHECK(t == again);
}

TEST_CASE("counter rng streams") {
  CounterRng a(123, 0), b(123, 0), c(123, 1);
  bool same = true, diff = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next(), y = b.next(), z = c.next();
    same = same && (x == y);
    diff = diff || (x != z);
  }
  CHECK(same);
  CHECK(diff);
  CounterRng u(9, 3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0);
    CHECK(x < 1);
  }
}
