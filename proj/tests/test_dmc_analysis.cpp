#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "jscc/dmc_analysis.hpp"
#include "oracles.hpp"

using namespace jscc;
using dmc::DmcChannel;

namespace {

DmcChannel bsc(double f) {
  Eigen::MatrixXd w(2, 2);
  w << 1 - f, f, f, 1 - f;
  return {w};
}

// Crossover-1/2 asymmetric binary channel with known closed forms.
DmcChannel z_channel() {
  Eigen::MatrixXd w(2, 2);
  w << 1, 0, 0.5, 0.5;
  return {w};
}

// Conditional information variance of P through ch, summed by brute force
// against the induced output law.
double brute_dispersion(const Eigen::VectorXd& p, const DmcChannel& ch) {
  const Eigen::VectorXd q = dmc::output_distribution(p, ch);
  double v = 0;
  for (int x = 0; x < ch.num_inputs(); ++x) {
    if (p(x) == 0) continue;
    double m1 = 0, m2 = 0;
    for (int y = 0; y < ch.num_outputs(); ++y) {
      const double w = ch.w(x, y);
      if (w == 0) continue;
      const double t = std::log(w / q(y));
      m1 += w * t;
      m2 += w * t * t;
    }
    v += p(x) * (m2 - m1 * m1);
  }
  return v;
}

}  // namespace

TEST_CASE("channel validation") {
  CHECK_NOTHROW(dmc::validate_channel(bsc(0.11)));
  Eigen::MatrixXd bad(2, 2);
  bad << 0.9, 0.6, 0.1, 0.9;  // first row sums to 1.5
  CHECK_THROWS_AS(dmc::validate_channel({bad}), NonStochasticError);
  bad << 1.2, -0.2, 0.5, 0.5;
  CHECK_THROWS_AS(dmc::validate_channel({bad}), NonStochasticError);
  CHECK_THROWS_AS(dmc::validate_channel({Eigen::MatrixXd(0, 0)}),
                  NonStochasticError);
}

TEST_CASE("mutual information and conditional information variance") {
  const DmcChannel ch = bsc(0.11);
  const Eigen::VectorXd unif = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(dmc::mutual_information(unif, ch) ==
        doctest::Approx(std::log(2.0) - oracle::binary_entropy(0.11))
            .epsilon(1e-12));

  Eigen::VectorXd point(2);
  point << 1, 0;
  CHECK(dmc::mutual_information(point, ch) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const DmcChannel noiseless{Eigen::MatrixXd::Identity(2, 2)};
  CHECK(dmc::mutual_information(unif, noiseless) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-13));

  // Uniform input through the symmetric channel: the per-letter variance is
  // the Bernoulli varentropy of the flip probability.
  CHECK(dmc::channel_dispersion(unif, ch) ==
        doctest::Approx(oracle::bernoulli_varentropy(0.11)).epsilon(1e-12));
  // Point mass: the induced output equals the active row, so the
  // information density is identically zero.
  CHECK(dmc::channel_dispersion(point, ch) ==
        doctest::Approx(0.0).epsilon(1e-13));
  CHECK(dmc::channel_dispersion(point, ch) ==
        doctest::Approx(brute_dispersion(point, ch)).epsilon(1e-13));
  CHECK(dmc::channel_dispersion(unif, noiseless) ==
        doctest::Approx(0.0).epsilon(1e-14));

  // Brute-force double sum on a random wide channel and input.
  std::mt19937_64 gen(314);
  const Eigen::MatrixXd w = oracle::random_row_stochastic(gen, 3, 4);
  const Eigen::VectorXd p = oracle::random_simplex(gen, 3);
  CHECK(dmc::channel_dispersion(p, {w}) ==
        doctest::Approx(brute_dispersion(p, {w})).epsilon(1e-13));
  CHECK(dmc::mutual_information(p, {w}) >= 0);
}

TEST_CASE("capacity: symmetric, noiseless, useless, asymmetric channels") {
  const dmc::CapacityResult c_bsc = dmc::capacity(bsc(0.11));
  CHECK(std::abs(c_bsc.capacity -
                 (std::log(2.0) - oracle::binary_entropy(0.11))) < 1e-9);
  CHECK(std::abs(c_bsc.input(0) - 0.5) < 1e-6);
  CHECK(std::abs(c_bsc.saddle_output(0) - 0.5) < 1e-6);
  REQUIRE(c_bsc.support.size() == 2);

  const dmc::CapacityResult c_id =
      dmc::capacity({Eigen::MatrixXd::Identity(3, 3)});
  CHECK(std::abs(c_id.capacity - std::log(3.0)) < 1e-9);
  CHECK(c_id.support.size() == 3);

  Eigen::MatrixXd flat(3, 2);
  flat << 0.4, 0.6, 0.4, 0.6, 0.4, 0.6;  // identical rows carry nothing
  const dmc::CapacityResult c_flat = dmc::capacity({flat});
  CHECK(c_flat.capacity < 1e-9);
  CHECK(c_flat.support.size() == 3);

  const dmc::CapacityResult c_z = dmc::capacity(z_channel());
  CHECK(std::abs(c_z.capacity - std::log(1.25)) < 1e-9);
  CHECK(std::abs(c_z.input(0) - 0.6) < 1e-6);
  CHECK(std::abs(c_z.saddle_output(0) - 0.8) < 1e-6);

  // A strictly dominated row drops out of the support classification.
  Eigen::MatrixXd with_dud(3, 2);
  with_dud << 0.89, 0.11, 0.11, 0.89, 0.5, 0.5;
  const dmc::CapacityResult c_dud = dmc::capacity({with_dud});
  CHECK(std::abs(c_dud.capacity - c_bsc.capacity) < 1e-9);
  REQUIRE(c_dud.support == std::vector<int>{0, 1});
  CHECK(c_dud.slack(2) > 0.1);

  // A deliberately unreachable duality gap raises the convergence error.
  Eigen::MatrixXd rect(2, 3);
  rect << 0.6, 0.3, 0.1, 0.1, 0.2, 0.7;
  CHECK_THROWS_AS(dmc::capacity({rect}, 1e-30), NonConvergenceError);
  CHECK_NOTHROW(dmc::capacity({rect}));
}

TEST_CASE("dispersion extremes: unique-input channels collapse the range") {
  const DmcChannel ch = bsc(0.11);
  const dmc::CapacityResult cap = dmc::capacity(ch);
  const dmc::DispersionExtremes ext = dmc::dispersion_extremes(ch, cap);
  const double v = oracle::bernoulli_varentropy(0.11);
  CHECK(std::abs(ext.v_minus - v) < 1e-9);
  CHECK(std::abs(ext.v_plus - v) < 1e-9);
  CHECK(std::abs(ext.p_plus(0) - 0.5) < 1e-6);

  const DmcChannel z = z_channel();
  const dmc::CapacityResult zc = dmc::capacity(z);
  const dmc::DispersionExtremes zx = dmc::dispersion_extremes(z, zc);
  CHECK(std::abs(zx.v_minus - 0.192181205567) < 1e-9);
  CHECK(std::abs(zx.v_plus - zx.v_minus) < 1e-9);
  CHECK(std::abs(zx.v_plus - brute_dispersion(zc.input, z)) < 1e-9);
}

TEST_CASE("dispersion extremes: level-set channel spans a genuine range") {
  const double xhi = 0.6;
  const double xlo = oracle::h3_partner(xhi);
  const DmcChannel gad{oracle::level_set_channel(xhi)};
  const dmc::CapacityResult cap = dmc::capacity(gad);

  // Every row sits at distance exactly C from the uniform output.
  CHECK(std::abs(cap.capacity - oracle::level_set_capacity(xhi)) < 1e-9);
  REQUIRE(cap.support.size() == 6);
  for (int x = 0; x < 6; ++x) CHECK(std::abs(cap.slack(x)) < 1e-8);

  const dmc::DispersionExtremes ext = dmc::dispersion_extremes(gad, cap);
  CHECK(std::abs(ext.v_plus - oracle::shape_variance(xhi)) < 1e-8);
  CHECK(std::abs(ext.v_minus - oracle::shape_variance(xlo)) < 1e-8);

  // Independent vertex enumeration over the same polytope.
  const auto vx = oracle::vertex_enumeration_extremes(
      gad.w, cap.support, cap.saddle_output);
  CHECK(std::abs(ext.v_plus - vx.v_max) < 1e-8);
  CHECK(std::abs(ext.v_minus - vx.v_min) < 1e-8);

  // Witnesses are valid distributions reproducing the saddle output, and
  // their dispersions reproduce the extreme values.
  for (const Eigen::VectorXd* p : {&ext.p_plus, &ext.p_minus}) {
    CHECK(p->minCoeff() >= -1e-12);
    CHECK(std::abs(p->sum() - 1) < 1e-9);
    CHECK((gad.w.transpose() * *p - cap.saddle_output)
              .lpNorm<Eigen::Infinity>() < 1e-8);
  }
  CHECK(std::abs(brute_dispersion(ext.p_plus, gad) - ext.v_plus) < 1e-9);
  CHECK(std::abs(brute_dispersion(ext.p_minus, gad) - ext.v_minus) < 1e-9);

  // Dispersion is linear along the segment between the two witnesses (the
  // output law is pinned, so the conditional variance mixes linearly).
  for (double alpha : {0.13, 0.5, 0.86}) {
    const Eigen::VectorXd mix =
        alpha * ext.p_plus + (1 - alpha) * ext.p_minus;
    CHECK(std::abs(dmc::channel_dispersion(mix, gad) -
                   (alpha * ext.v_plus + (1 - alpha) * ext.v_minus)) < 1e-9);
  }
}

TEST_CASE("dispersion extremes: block channel mixes component variances") {
  const double xhi = 0.6;
  const double xlo = oracle::h3_partner(xhi);
  const DmcChannel comp{oracle::composite_channel(xhi)};
  const dmc::CapacityResult cap = dmc::capacity(comp);

  // Two equal-capacity blocks: total capacity climbs by exactly log 2.
  CHECK(std::abs(cap.capacity -
                 (oracle::level_set_capacity(xhi) + std::log(2.0))) < 1e-8);
  REQUIRE(cap.support.size() == 8);

  const double flip =
      oracle::bsc_matching_flip(oracle::level_set_capacity(xhi));
  const double vb = oracle::bernoulli_varentropy(flip);
  const dmc::DispersionExtremes ext = dmc::dispersion_extremes(comp, cap);
  CHECK(std::abs(ext.v_plus -
                 0.5 * (oracle::shape_variance(xhi) + vb)) < 1e-8);
  CHECK(std::abs(ext.v_minus -
                 0.5 * (oracle::shape_variance(xlo) + vb)) < 1e-8);

  const auto vx = oracle::vertex_enumeration_extremes(
      comp.w, cap.support, cap.saddle_output);
  CHECK(std::abs(ext.v_plus - vx.v_max) < 1e-8);
  CHECK(std::abs(ext.v_minus - vx.v_min) < 1e-8);
}

TEST_CASE("dispersion extremes and capacity on random channels") {
  std::mt19937_64 gen(2718);
  for (int trial = 0; trial < 6; ++trial) {
    const int nx = 2 + static_cast<int>(gen() % 5);
    const int ny = 2 + static_cast<int>(gen() % 3);
    const DmcChannel ch{oracle::random_row_stochastic(gen, nx, ny)};
    const dmc::CapacityResult cap = dmc::capacity(ch);
    CHECK(cap.capacity >= -1e-12);
    CHECK(!cap.support.empty());
    CHECK(cap.slack.minCoeff() > -1e-7);

    // No input law beats the reported capacity.
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd p = oracle::random_simplex(gen, nx);
      CHECK(dmc::mutual_information(p, ch) <= cap.capacity + 1e-9);
    }

    const dmc::DispersionExtremes ext = dmc::dispersion_extremes(ch, cap);
    CHECK(ext.v_minus <= ext.v_plus + 1e-12);
    const auto vx = oracle::vertex_enumeration_extremes(
        ch.w, cap.support, cap.saddle_output);
    CHECK(std::abs(ext.v_plus - vx.v_max) < 1e-7);
    CHECK(std::abs(ext.v_minus - vx.v_min) < 1e-7);
  }
}

TEST_CASE("infeasible support classification is reported, not silently fixed") {
  const DmcChannel ch = bsc(0.11);
  dmc::CapacityResult doctored = dmc::capacity(ch);
  doctored.support = {0};  // row 0 alone cannot induce the uniform saddle
  CHECK_THROWS_AS(dmc::dispersion_extremes(ch, doctored),
                  InfeasiblePolytopeError);
}
