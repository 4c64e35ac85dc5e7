#include "jscc/markov_info.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace jscc::markov {

namespace {

// Successors of column j are the rows i with probs(i, j) > 0.
std::vector<int> bfs_levels(const Eigen::MatrixXd& w, bool transpose) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> level(n, -1);
  std::queue<int> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      double p = transpose ? w(u, v) : w(v, u);
      if (p > 0 && level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  return level;
}

}  // namespace

void validate_chain(const TransitionMatrix& chain, double tol) {
  const Eigen::MatrixXd& w = chain.probs;
  const int n = static_cast<int>(w.rows());
  if (n == 0 || w.cols() != n) {
    throw NonStochasticError("transition matrix must be square and nonempty");
  }
  for (int j = 0; j < n; ++j) {
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      double p = w(i, j);
      if (!std::isfinite(p) || p < 0) {
        std::ostringstream os;
        os << "entry W(" << i << "|" << j << ") = " << p
           << " is not a probability";
        throw NonStochasticError(os.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "column " << j << " sums to " << sum << ", expected 1 within "
         << tol;
      throw NonStochasticError(os.str());
    }
  }

  auto fwd = bfs_levels(w, false);
  for (int v = 0; v < n; ++v) {
    if (fwd[v] < 0) {
      std::ostringstream os;
      os << "state " << v << " is unreachable from state 0";
      throw ReducibleError(os.str());
    }
  }
  auto bwd = bfs_levels(w, true);
  for (int v = 0; v < n; ++v) {
    if (bwd[v] < 0) {
      std::ostringstream os;
      os << "state 0 is unreachable from state " << v;
      throw ReducibleError(os.str());
    }
  }

  // Period of a strongly connected graph: gcd over edges j -> i of
  // level(j) + 1 - level(i) against any BFS level assignment.
  long long g = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (w(i, j) > 0) {
        long long d = static_cast<long long>(fwd[j]) + 1 - fwd[i];
        g = std::gcd(g, d < 0 ? -d : d);
      }
    }
  }
  if (g != 1) {
    std::ostringstream os;
    os << "chain is periodic with period " << g;
    throw PeriodicError(os.str());
  }
}

NonHiddenChain check_non_hidden(const TransitionMatrix& chain, int nx, int nz,
                                double tol) {
  const Eigen::MatrixXd& w = chain.probs;
  if (nx < 1 || nz < 1 ||
      static_cast<int>(w.rows()) != nx * nz) {
    std::ostringstream os;
    os << "pair chain has " << w.rows() << " states, expected nx*nz = "
       << nx * nz;
    throw DomainError(os.str());
  }
  validate_chain(chain, tol);

  Eigen::MatrixXd wz = Eigen::MatrixXd::Zero(nz, nz);
  for (int zp = 0; zp < nz; ++zp) {
    for (int z = 0; z < nz; ++z) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      int lo_xp = 0, hi_xp = 0;
      double mean = 0;
      for (int xp = 0; xp < nx; ++xp) {
        double s = 0;
        for (int x = 0; x < nx; ++x) {
          s += w(x * nz + z, xp * nz + zp);
        }
        if (s < lo) {
          lo = s;
          lo_xp = xp;
        }
        if (s > hi) {
          hi = s;
          hi_xp = xp;
        }
        mean += s;
      }
      if (hi - lo > tol) {
        std::ostringstream os;
        os << "z-marginal depends on the conditioning x: for z=" << z
           << ", z'=" << zp << " the sum over x is " << hi << " at x'="
           << hi_xp << " but " << lo << " at x'=" << lo_xp;
        throw HiddenMarginalError(os.str());
      }
      wz(z, zp) = mean / nx;
    }
  }
  return NonHiddenChain{w, nx, nz, wz};
}

NonHiddenChain as_non_hidden(const TransitionMatrix& chain) {
  return check_non_hidden(chain, static_cast<int>(chain.probs.rows()), 1);
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& probs) {
  const int n = static_cast<int>(probs.rows());
  if (n == 0 || probs.cols() != n) {
    throw DomainError("stationary_distribution needs a square matrix");
  }
  // (W - I) pi = 0 with the last balance equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = probs - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);

  for (int i = 0; i < n; ++i) {
    if (pi(i) < 0 && pi(i) > -1e-13) pi(i) = 0;
  }
  double sum = pi.sum();
  if (sum > 0) pi /= sum;
  double resid = (probs * pi - pi).lpNorm<Eigen::Infinity>();
  if (!(resid < 1e-12) || pi.minCoeff() < 0) {
    std::ostringstream os;
    os << "stationary solve residual " << resid << " exceeds 1e-12";
    throw NonConvergenceError(os.str());
  }
  return pi;
}

namespace {

Eigen::MatrixXd tilted_matrix(const NonHiddenChain& chain, double theta) {
  const int n = chain.dim();
  Eigen::MatrixXd t(n, n);
  for (int j = 0; j < n; ++j) {
    int zp = chain.z_of(j);
    for (int i = 0; i < n; ++i) {
      double p = chain.probs(i, j);
      if (p <= 0) {
        t(i, j) = 0.0;  // 0^(1+theta) := 0, and then the marginal tilt is moot
      } else {
        double q = chain.marginal_z(chain.z_of(i), zp);
        t(i, j) = std::pow(p, 1.0 + theta) * std::pow(q, -theta);
      }
    }
  }
  return t;
}

}  // namespace

double perron_eigenvalue(const NonHiddenChain& chain, double theta,
                         double rel_tol) {
  if (!(theta >= -0.5 && theta <= 0.5)) {
    std::ostringstream os;
    os << "tilt theta = " << theta << " outside working range [-0.5, 0.5]";
    throw DomainError(os.str());
  }
  const int n = chain.dim();
  Eigen::MatrixXd t = tilted_matrix(chain, theta);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);

  double best_width = std::numeric_limits<double>::infinity();
  int stall = 0;
  const long cap = 1000000;
  for (long iter = 0; iter < cap; ++iter) {
    Eigen::VectorXd u = t * v;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    for (int i = 0; i < n; ++i) {
      if (v(i) > 0) {
        double r = u(i) / v(i);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    if (!(hi > 0) || !std::isfinite(hi)) {
      throw NonConvergenceError("power iteration collapsed; matrix may be "
                                "degenerate");
    }
    double width = hi - lo;
    if (width <= rel_tol * hi) return 0.5 * (lo + hi);
    // The bracket floors near machine precision; accept a stalled bracket
    // that is already far inside the published 1e-13 contract.
    if (width < best_width * 0.999999) {
      best_width = width;
      stall = 0;
    } else if (++stall > 2000) {
      if (width <= 4e-13 * hi) return 0.5 * (lo + hi);
      break;
    }
    v = u / u.sum();
  }
  throw NonConvergenceError(
      "power iteration failed to certify the Perron root at the requested "
      "tolerance");
}

namespace {

struct LogLambdaGrid {
  // f[k][0] = log lambda at +h/2^k, f[k][1] at -h/2^k, k = 0,1,2; f0 at 0.
  double f[3][2];
  double f0;
  double lambda[3][2];
  static constexpr double kH = 1e-2;
};

LogLambdaGrid log_lambda_grid(const NonHiddenChain& chain) {
  LogLambdaGrid g{};
  for (int k = 0; k < 3; ++k) {
    double h = LogLambdaGrid::kH / (1 << k);
    g.lambda[k][0] = perron_eigenvalue(chain, h, 1e-15);
    g.lambda[k][1] = perron_eigenvalue(chain, -h, 1e-15);
    g.f[k][0] = std::log(g.lambda[k][0]);
    g.f[k][1] = std::log(g.lambda[k][1]);
  }
  g.f0 = std::log(perron_eigenvalue(chain, 0.0, 1e-15));
  return g;
}

double richardson3(double a0, double a1, double a2) {
  // Entries at h, h/2, h/4 with even-power error expansion.
  double e1 = (4.0 * a1 - a0) / 3.0;
  double e2 = (4.0 * a2 - a1) / 3.0;
  return (16.0 * e2 - e1) / 15.0;
}

}  // namespace

double entropy_rate(const NonHiddenChain& chain) {
  LogLambdaGrid g = log_lambda_grid(chain);
  double d[3];
  for (int k = 0; k < 3; ++k) {
    double h = LogLambdaGrid::kH / (1 << k);
    d[k] = (g.f[k][0] - g.f[k][1]) / (2.0 * h);
  }
  return -richardson3(d[0], d[1], d[2]);
}

double varentropy_rate(const NonHiddenChain& chain) {
  LogLambdaGrid g = log_lambda_grid(chain);
  double s[3];
  for (int k = 0; k < 3; ++k) {
    double h = LogLambdaGrid::kH / (1 << k);
    s[k] = (g.f[k][0] - 2.0 * g.f0 + g.f[k][1]) / (h * h);
  }
  double v = richardson3(s[0], s[1], s[2]);
  if (v < -1e-7) {
    std::ostringstream os;
    os << "second difference of log lambda came out " << v
       << "; the extrapolation step is too coarse for this chain";
    throw NegativeVarianceError(os.str());
  }
  return std::max(v, 0.0);
}

double conditional_renyi_entropy(const NonHiddenChain& chain, double theta) {
  if (theta == 0.0) {
    throw DomainError("Renyi order 1+theta needs theta != 0; use "
                      "entropy_rate for the theta -> 0 limit");
  }
  return -std::log(perron_eigenvalue(chain, theta)) / theta;
}

InfoRates info_rates(const NonHiddenChain& chain) {
  LogLambdaGrid g = log_lambda_grid(chain);
  InfoRates r;
  double d[3], s[3];
  for (int k = 0; k < 3; ++k) {
    double h = LogLambdaGrid::kH / (1 << k);
    d[k] = (g.f[k][0] - g.f[k][1]) / (2.0 * h);
    s[k] = (g.f[k][0] - 2.0 * g.f0 + g.f[k][1]) / (h * h);
  }
  r.entropy = -richardson3(d[0], d[1], d[2]);
  double v = richardson3(s[0], s[1], s[2]);
  if (v < -1e-7) {
    throw NegativeVarianceError("varentropy extrapolation went negative");
  }
  r.varentropy = std::max(v, 0.0);
  for (int k = 0; k < 3; ++k) {
    double h = LogLambdaGrid::kH / (1 << k);
    r.theta_samples.push_back({h, g.lambda[k][0], -g.f[k][0] / h});
    r.theta_samples.push_back({-h, g.lambda[k][1], g.f[k][1] / h});
  }
  return r;
}

}  // namespace jscc::markov
