#include "jscc/finite_blocklength_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "jscc/rng.hpp"

namespace jscc::lab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dist(const Eigen::VectorXd& p, const char* name) {
  if (p.size() == 0) {
    throw DomainError(std::string(name) + " distribution is empty");
  }
  double sum = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= 0) || !std::isfinite(p(i))) {
      std::ostringstream os;
      os << name << "(" << i << ") = " << p(i) << " is not a probability";
      throw DomainError(os.str());
    }
    sum += p(i);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << name << " sums to " << sum << ", expected 1";
    throw DomainError(os.str());
  }
}

void check_positive(std::int64_t value, const char* name) {
  if (value < 1) {
    std::ostringstream os;
    os << name << " must be >= 1, got " << value;
    throw DomainError(os.str());
  }
}

void check_map(const std::vector<int>& map, int range, const char* name) {
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] < 0 || map[i] >= range) {
      std::ostringstream os;
      os << name << "[" << i << "] = " << map[i] << " outside [0, " << range
         << ")";
      throw DomainError(os.str());
    }
  }
}

// Row-major sampling table with matching log-probabilities. For a
// column-stochastic chain pass the transpose so row j lists the successors
// of state j contiguously.
struct SampleTable {
  int rows = 0;
  int cols = 0;
  std::vector<double> p;
  std::vector<double> logp;

  explicit SampleTable(const Eigen::MatrixXd& row_stochastic)
      : rows(static_cast<int>(row_stochastic.rows())),
        cols(static_cast<int>(row_stochastic.cols())),
        p(static_cast<std::size_t>(rows) * cols),
        logp(static_cast<std::size_t>(rows) * cols) {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        double v = row_stochastic(i, j);
        p[static_cast<std::size_t>(i) * cols + j] = v;
        logp[static_cast<std::size_t>(i) * cols + j] =
            v > 0 ? std::log(v) : kNegInf;
      }
    }
  }

  int draw(int row, double u) const {
    const double* q = p.data() + static_cast<std::size_t>(row) * cols;
    double acc = 0;
    int last = 0;
    for (int j = 0; j < cols; ++j) {
      if (q[j] <= 0) continue;
      last = j;
      acc += q[j];
      if (u < acc) return j;
    }
    return last;
  }

  double log_at(int row, int col) const {
    return logp[static_cast<std::size_t>(row) * cols + col];
  }
};

struct VecTable {
  std::vector<double> p;
  std::vector<double> logp;

  explicit VecTable(const Eigen::VectorXd& v)
      : p(v.data(), v.data() + v.size()), logp(p.size()) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      logp[i] = p[i] > 0 ? std::log(p[i]) : kNegInf;
    }
  }

  int draw(double u) const {
    double acc = 0;
    int last = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] <= 0) continue;
      last = static_cast<int>(j);
      acc += p[j];
      if (u < acc) return last;
    }
    return last;
  }
};

// Splits `samples` into one contiguous block per worker (worker index is the
// RNG stream) and reduces in worker order, so results are reproducible for a
// fixed (seed, workers) pair no matter how threads are scheduled.
template <class Body>
void parallel_blocks(std::int64_t samples, std::uint64_t seed, int workers,
                     const Body& body) {
  check_positive(samples, "samples");
  check_positive(workers, "workers");
  const int w = static_cast<int>(
      std::min<std::int64_t>(workers, samples));
  if (w == 1) {
    CounterRng rng(seed, 0);
    body(0, std::int64_t{0}, samples, rng);
    return;
  }
  const std::int64_t base = samples / w;
  const std::int64_t rem = samples % w;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
  threads.reserve(static_cast<std::size_t>(w));
  std::int64_t begin = 0;
  for (int i = 0; i < w; ++i) {
    const std::int64_t count = base + (i < rem ? 1 : 0);
    threads.emplace_back([&body, &errors, i, begin, count, seed] {
      try {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        body(i, begin, count, rng);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    });
    begin += count;
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double binom_half_width(double phat, std::int64_t n) {
  return 1.96 * std::sqrt(std::max(0.0, phat * (1.0 - phat)) /
                          static_cast<double>(n));
}

void check_single_shot(const SingleShotInstance& inst) {
  dmc::validate_channel(inst.channel);
  check_dist(inst.p_m, "p_m");
}

// Walks the pair chain for n steps and returns the conditional path
// information -log P(x^n | z^n) = [-log P(path)] - [-log P(z-path)].
double conditional_path_info(const SampleTable& pair_step,
                             const VecTable& pair_init,
                             const std::vector<double>& log_z_step,
                             const std::vector<double>& log_z_init, int nz,
                             int n, CounterRng& rng) {
  int s = pair_init.draw(rng.uniform());
  double joint = -pair_init.logp[static_cast<std::size_t>(s)];
  double margin = -log_z_init[static_cast<std::size_t>(s % nz)];
  for (int i = 1; i < n; ++i) {
    const int t = pair_step.draw(s, rng.uniform());
    joint -= pair_step.log_at(s, t);
    margin -= log_z_step[static_cast<std::size_t>(s % nz) *
                             static_cast<std::size_t>(nz) +
                         static_cast<std::size_t>(t % nz)];
    s = t;
  }
  return joint - margin;
}

}  // namespace

double exact_single_shot(const SingleShotInstance& inst) {
  return exact_single_shot_code(inst).error;
}

SingleShotCode exact_single_shot_code(const SingleShotInstance& inst) {
  check_single_shot(inst);
  const int nm = static_cast<int>(inst.p_m.size());
  const int nx = inst.channel.num_inputs();
  const int ny = inst.channel.num_outputs();
  if (nm > 8 || nx > 4 || ny > 4) {
    std::ostringstream os;
    os << "exhaustive encoder search capped at |M| <= 8, |X| <= 4, |Y| <= 4; "
       << "got |M| = " << nm << ", |X| = " << nx << ", |Y| = " << ny;
    throw TooLargeError(os.str());
  }

  SingleShotCode best;
  best.error = 2.0;
  std::vector<int> enc(static_cast<std::size_t>(nm), 0);
  for (;;) {
    // MAP decoding: P(correct) = sum_y max_m p(m) W(y | enc(m)).
    double correct = 0;
    for (int y = 0; y < ny; ++y) {
      double top = 0;
      for (int m = 0; m < nm; ++m) {
        top = std::max(top, inst.p_m(m) * inst.channel.w(enc[m], y));
      }
      correct += top;
    }
    if (1.0 - correct < best.error) {
      best.error = 1.0 - correct;
      best.encoder = enc;
    }
    int d = 0;
    while (d < nm && ++enc[static_cast<std::size_t>(d)] == nx) {
      enc[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == nm) break;
  }
  best.error = std::max(0.0, best.error);
  return best;
}

double achievability_rhs(const SingleShotInstance& inst,
                         const Eigen::VectorXd& p_x, double c) {
  check_single_shot(inst);
  check_dist(p_x, "p_x");
  if (p_x.size() != inst.channel.num_inputs()) {
    throw DomainError("p_x length does not match the channel input alphabet");
  }
  if (!(c > 0) || !std::isfinite(c)) {
    throw DomainError("threshold c must be positive and finite");
  }
  const Eigen::VectorXd q = dmc::output_distribution(p_x, inst.channel);
  double sum = 0;
  for (Eigen::Index m = 0; m < inst.p_m.size(); ++m) {
    for (int x = 0; x < inst.channel.num_inputs(); ++x) {
      for (int y = 0; y < inst.channel.num_outputs(); ++y) {
        const double joint = inst.p_m(m) * p_x(x) * inst.channel.w(x, y);
        if (joint <= c * p_x(x) * q(y)) sum += joint;
      }
    }
  }
  return std::min(1.0, sum + 1.0 / c);
}

double converse_rhs(const SingleShotInstance& inst,
                    const std::vector<int>& encoder,
                    const Eigen::VectorXd& q_y, double c) {
  check_single_shot(inst);
  if (static_cast<Eigen::Index>(encoder.size()) != inst.p_m.size()) {
    throw DomainError("encoder length does not match the message alphabet");
  }
  check_map(encoder, inst.channel.num_inputs(), "encoder");
  check_dist(q_y, "q_y");
  if (q_y.size() != inst.channel.num_outputs()) {
    throw DomainError("q_y length does not match the channel output alphabet");
  }
  if (!(c > 0) || !std::isfinite(c)) {
    throw DomainError("threshold c must be positive and finite");
  }
  double sum = 0;
  for (Eigen::Index m = 0; m < inst.p_m.size(); ++m) {
    const int x = encoder[static_cast<std::size_t>(m)];
    for (int y = 0; y < inst.channel.num_outputs(); ++y) {
      const double mass = inst.p_m(m) * inst.channel.w(x, y);
      if (mass <= c * q_y(y)) sum += mass;
    }
  }
  return sum - c;
}

BoundPair ca_bound_pair(const markov::TransitionMatrix& source,
                        const markov::NonHiddenChain& noise, int k, int n,
                        std::int64_t samples, std::uint64_t seed,
                        int workers) {
  check_positive(k, "k");
  check_positive(n, "n");
  markov::validate_chain(source);
  // Revalidate the pair structure in case the struct was assembled by hand.
  const markov::NonHiddenChain nh = markov::check_non_hidden(
      markov::TransitionMatrix{noise.probs}, noise.nx, noise.nz);

  const VecTable src_init(markov::stationary_distribution(source.probs));
  const SampleTable src_step(source.probs.transpose());
  const VecTable pair_init(markov::stationary_distribution(nh.probs));
  const SampleTable pair_step(nh.probs.transpose());
  const Eigen::VectorXd pi_z = markov::stationary_distribution(nh.marginal_z);
  std::vector<double> log_z_init(static_cast<std::size_t>(nh.nz));
  for (int z = 0; z < nh.nz; ++z) {
    log_z_init[static_cast<std::size_t>(z)] =
        pi_z(z) > 0 ? std::log(pi_z(z)) : kNegInf;
  }
  // log W_Z(z'|z) laid out by conditioning state z.
  std::vector<double> log_z_step(static_cast<std::size_t>(nh.nz) * nh.nz);
  for (int z = 0; z < nh.nz; ++z) {
    for (int zp = 0; zp < nh.nz; ++zp) {
      const double v = nh.marginal_z(zp, z);
      log_z_step[static_cast<std::size_t>(z) * nh.nz + zp] =
          v > 0 ? std::log(v) : kNegInf;
    }
  }

  const double base = static_cast<double>(n) * std::log(nh.nx);
  const double delta = std::pow(static_cast<double>(n), 0.25);
  const double slack = std::exp(-delta);

  const int max_workers =
      std::max(1, static_cast<int>(std::min<std::int64_t>(workers, samples)));
  std::vector<std::int64_t> hits_ach(static_cast<std::size_t>(max_workers), 0);
  std::vector<std::int64_t> hits_conv(static_cast<std::size_t>(max_workers),
                                      0);
  parallel_blocks(
      samples, seed, workers,
      [&](int w, std::int64_t, std::int64_t count, CounterRng& rng) {
        std::int64_t a = 0, c = 0;
        for (std::int64_t i = 0; i < count; ++i) {
          int m = src_init.draw(rng.uniform());
          double t = -src_init.logp[static_cast<std::size_t>(m)];
          for (int j = 1; j < k; ++j) {
            const int m2 = src_step.draw(m, rng.uniform());
            t -= src_step.log_at(m, m2);
            m = m2;
          }
          t += conditional_path_info(pair_step, pair_init, log_z_step,
                                     log_z_init, nh.nz, n, rng);
          if (t >= base - delta) ++a;
          if (t >= base + delta) ++c;
        }
        hits_ach[static_cast<std::size_t>(w)] = a;
        hits_conv[static_cast<std::size_t>(w)] = c;
      });

  std::int64_t ta = 0, tc = 0;
  for (int w = 0; w < max_workers; ++w) {
    ta += hits_ach[static_cast<std::size_t>(w)];
    tc += hits_conv[static_cast<std::size_t>(w)];
  }
  const double pa = static_cast<double>(ta) / static_cast<double>(samples);
  const double pc = static_cast<double>(tc) / static_cast<double>(samples);
  BoundPair out;
  out.achievability.value = std::min(1.0, pa + slack);
  out.achievability.half_width = binom_half_width(pa, samples);
  out.converse.value = std::max(0.0, pc - slack);
  out.converse.half_width = binom_half_width(pc, samples);
  return out;
}

TwoRegimeResult two_regime_estimate(const markov::TransitionMatrix& source,
                                    const dmc::DmcChannel& channel, double r,
                                    int n, std::int64_t samples,
                                    std::uint64_t seed, int workers) {
  check_positive(n, "n");
  if (!std::isfinite(r)) throw DomainError("rate offset r must be finite");
  const dmc::CapacityResult cap = dmc::capacity(channel);
  const dmc::DispersionExtremes ext = dmc::dispersion_extremes(channel, cap);
  const markov::NonHiddenChain nh = markov::as_non_hidden(source);
  const double h = markov::entropy_rate(nh);
  if (!(h > 0)) {
    throw DomainError("two-regime scheme needs positive source entropy rate");
  }
  const double c0 = cap.capacity;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const long long k = std::llround(c0 / h * n + r / h * sqrt_n);
  if (k < 1) {
    std::ostringstream os;
    os << "message block length k = " << k
       << " is not positive; raise n or the rate offset";
    throw DomainError(os.str());
  }

  const VecTable src_init(markov::stationary_distribution(source.probs));
  const SampleTable src_step(source.probs.transpose());
  const SampleTable ch(channel.w);
  const VecTable p_plus(ext.p_plus);
  const VecTable p_minus(ext.p_minus);
  const int ny = channel.num_outputs();
  std::vector<double> log_q(static_cast<std::size_t>(ny));
  for (int y = 0; y < ny; ++y) {
    log_q[static_cast<std::size_t>(y)] =
        cap.saddle_output(y) > 0 ? std::log(cap.saddle_output(y)) : kNegInf;
  }

  const int max_workers =
      std::max(1, static_cast<int>(std::min<std::int64_t>(workers, samples)));
  std::vector<std::int64_t> hits(static_cast<std::size_t>(max_workers), 0);
  parallel_blocks(
      samples, seed, workers,
      [&](int w, std::int64_t, std::int64_t count, CounterRng& rng) {
        std::int64_t hit = 0;
        for (std::int64_t i = 0; i < count; ++i) {
          int m = src_init.draw(rng.uniform());
          double ip = -src_init.logp[static_cast<std::size_t>(m)];
          for (long long j = 1; j < k; ++j) {
            const int m2 = src_step.draw(m, rng.uniform());
            ip -= src_step.log_at(m, m2);
            m = m2;
          }
          const double s_fluct = (static_cast<double>(k) * h - ip) / sqrt_n;
          const VecTable& px = s_fluct <= r ? p_plus : p_minus;
          double acc = 0;
          for (int j = 0; j < n; ++j) {
            const int x = px.draw(rng.uniform());
            const int y = ch.draw(x, rng.uniform());
            acc += ch.log_at(x, y) - log_q[static_cast<std::size_t>(y)];
          }
          const double c_fluct = (static_cast<double>(n) * c0 - acc) / sqrt_n;
          if (s_fluct - c_fluct <= r) ++hit;
        }
        hits[static_cast<std::size_t>(w)] = hit;
      });

  std::int64_t total = 0;
  for (int w = 0; w < max_workers; ++w) {
    total += hits[static_cast<std::size_t>(w)];
  }
  TwoRegimeResult out;
  out.value = static_cast<double>(total) / static_cast<double>(samples);
  out.half_width = binom_half_width(out.value, samples);
  out.k = k;
  return out;
}

SeparationCheck separation_product_check(const SeparationScheme& scheme) {
  dmc::validate_channel(scheme.channel);
  check_dist(scheme.p_m, "p_m");
  const int nm = static_cast<int>(scheme.p_m.size());
  const int na = static_cast<int>(scheme.source_dec.size());
  const int nx = scheme.channel.num_inputs();
  const int ny = scheme.channel.num_outputs();
  if (static_cast<int>(scheme.source_enc.size()) != nm) {
    throw DomainError("source encoder length must equal |M|");
  }
  if (static_cast<int>(scheme.channel_enc.size()) != na) {
    throw DomainError("channel encoder length must equal the index alphabet");
  }
  if (static_cast<int>(scheme.channel_dec.size()) != ny) {
    throw DomainError("channel decoder length must equal |Y|");
  }
  if (na < 1 || na > 4) {
    std::ostringstream os;
    os << "index alphabet size " << na
       << " outside [1, 4]; the permutation average is enumerated exactly";
    throw TooLargeError(os.str());
  }
  check_map(scheme.source_enc, na, "source_enc");
  check_map(scheme.source_dec, nm, "source_dec");
  check_map(scheme.channel_enc, nx, "channel_enc");
  check_map(scheme.channel_dec, na, "channel_dec");
  for (int j = 0; j < na; ++j) {
    const int m = scheme.source_dec[static_cast<std::size_t>(j)];
    if (scheme.source_enc[static_cast<std::size_t>(m)] != j) {
      std::ostringstream os;
      os << "source code inconsistent: dec(" << j << ") = " << m
         << " but enc(" << m << ") = "
         << scheme.source_enc[static_cast<std::size_t>(m)]
         << "; the interleaving identity requires enc(dec(j)) = j";
      throw DomainError(os.str());
    }
  }

  SeparationCheck out;
  for (int m = 0; m < nm; ++m) {
    const int j = scheme.source_enc[static_cast<std::size_t>(m)];
    if (scheme.source_dec[static_cast<std::size_t>(j)] != m) {
      out.p_source += scheme.p_m(m);
    }
  }
  for (int a = 0; a < na; ++a) {
    const int x = scheme.channel_enc[static_cast<std::size_t>(a)];
    for (int y = 0; y < ny; ++y) {
      if (scheme.channel_dec[static_cast<std::size_t>(y)] != a) {
        out.p_channel += scheme.channel.w(x, y);
      }
    }
  }
  out.p_channel /= static_cast<double>(na);

  std::vector<int> perm(static_cast<std::size_t>(na));
  std::vector<int> inv(static_cast<std::size_t>(na));
  for (int i = 0; i < na; ++i) perm[static_cast<std::size_t>(i)] = i;
  double total = 0;
  std::int64_t nperm = 0;
  do {
    for (int i = 0; i < na; ++i) {
      inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
    }
    double err = 0;
    for (int m = 0; m < nm; ++m) {
      const int a = perm[static_cast<std::size_t>(
          scheme.source_enc[static_cast<std::size_t>(m)])];
      const int x = scheme.channel_enc[static_cast<std::size_t>(a)];
      for (int y = 0; y < ny; ++y) {
        const int ahat = scheme.channel_dec[static_cast<std::size_t>(y)];
        const int mhat =
            scheme.source_dec[static_cast<std::size_t>(
                inv[static_cast<std::size_t>(ahat)])];
        if (mhat != m) err += scheme.p_m(m) * scheme.channel.w(x, y);
      }
    }
    total += err;
    ++nperm;
  } while (std::next_permutation(perm.begin(), perm.end()));

  out.averaged = total / static_cast<double>(nperm);
  out.product = out.p_source + out.p_channel - out.p_source * out.p_channel;
  return out;
}

std::vector<double> sample_info_density(const markov::NonHiddenChain& chain,
                                        int n, std::int64_t samples,
                                        std::uint64_t seed, int workers) {
  check_positive(n, "n");
  const markov::NonHiddenChain nh = markov::check_non_hidden(
      markov::TransitionMatrix{chain.probs}, chain.nx, chain.nz);
  const double h = markov::entropy_rate(nh);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  const VecTable pair_init(markov::stationary_distribution(nh.probs));
  const SampleTable pair_step(nh.probs.transpose());
  const Eigen::VectorXd pi_z = markov::stationary_distribution(nh.marginal_z);
  std::vector<double> log_z_init(static_cast<std::size_t>(nh.nz));
  for (int z = 0; z < nh.nz; ++z) {
    log_z_init[static_cast<std::size_t>(z)] =
        pi_z(z) > 0 ? std::log(pi_z(z)) : kNegInf;
  }
  std::vector<double> log_z_step(static_cast<std::size_t>(nh.nz) * nh.nz);
  for (int z = 0; z < nh.nz; ++z) {
    for (int zp = 0; zp < nh.nz; ++zp) {
      const double v = nh.marginal_z(zp, z);
      log_z_step[static_cast<std::size_t>(z) * nh.nz + zp] =
          v > 0 ? std::log(v) : kNegInf;
    }
  }

  std::vector<double> out(static_cast<std::size_t>(samples), 0.0);
  parallel_blocks(
      samples, seed, workers,
      [&](int, std::int64_t begin, std::int64_t count, CounterRng& rng) {
        for (std::int64_t i = 0; i < count; ++i) {
          const double info = conditional_path_info(
              pair_step, pair_init, log_z_step, log_z_init, nh.nz, n, rng);
          out[static_cast<std::size_t>(begin + i)] =
              (info - static_cast<double>(n) * h) / sqrt_n;
        }
      });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace jscc::lab
