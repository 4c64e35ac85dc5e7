#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jscc/errors.hpp"

namespace jscc::markov {

// Column-stochastic transition matrix: probs(i, j) = W(state i | state j),
// every column sums to one. States of a pair chain on X x Z are flattened
// as s = x * nz + z.
struct TransitionMatrix {
  Eigen::MatrixXd probs;
};

// Checks stochasticity (entries >= 0, column sums within tol of 1),
// irreducibility, and aperiodicity. Throws NonStochasticError,
// ReducibleError, or PeriodicError naming the violated property.
void validate_chain(const TransitionMatrix& chain, double tol = 1e-12);

// A pair chain on X x Z whose z-marginal transition law does not depend on
// the conditioning x-coordinate. marginal_z(z, zp) = W_Z(z | zp) is the
// common marginal; it is itself column-stochastic.
struct NonHiddenChain {
  Eigen::MatrixXd probs;
  int nx = 1;
  int nz = 1;
  Eigen::MatrixXd marginal_z;

  int dim() const { return nx * nz; }
  int x_of(int s) const { return s / nz; }
  int z_of(int s) const { return s % nz; }
};

// Validates the chain and verifies that sum_x W((x,z)|(x',z')) is the same
// for every x' (within tol); the common value becomes W_Z(z|z'). Throws
// HiddenMarginalError with a witness (z, z', x' pair, both sums) otherwise.
NonHiddenChain check_non_hidden(const TransitionMatrix& chain, int nx, int nz,
                                double tol = 1e-12);

// Convenience wrapper for an ordinary chain observed in full (nz = 1).
NonHiddenChain as_non_hidden(const TransitionMatrix& chain);

// Stationary distribution of a column-stochastic matrix, solved directly;
// postcondition ||W pi - pi||_inf < 1e-12 enforced (NonConvergenceError).
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& probs);

// Perron root of the tilted pair matrix
//   T((x,z),(x',z')) = W(x,z|x',z')^(1+theta) * W_Z(z|z')^(-theta)
// by power iteration with a Collatz-Wielandt bracket certificate:
// the returned value is the bracket midpoint once (max-min) <= rel_tol * max.
// theta must lie in [-0.5, 0.5]. Zero transition entries stay zero.
double perron_eigenvalue(const NonHiddenChain& chain, double theta,
                         double rel_tol = 1e-13);

// Conditional Renyi entropy rate of order 1+theta:  -log(lambda_theta)/theta,
// theta in [-0.5, 0.5] \ {0}.
double conditional_renyi_entropy(const NonHiddenChain& chain, double theta);

// Conditional entropy rate H = -d/dtheta log lambda_theta at theta = 0,
// extracted by Richardson-extrapolated central differences at
// theta = +-{1e-2, 5e-3, 2.5e-3}.
double entropy_rate(const NonHiddenChain& chain);

// Conditional varentropy rate V = d^2/dtheta^2 log lambda_theta at theta = 0,
// same extrapolation grid. Nonnegative; a clearly negative numerical result
// (< -1e-7) raises NegativeVarianceError, noise above that is clamped to 0.
double varentropy_rate(const NonHiddenChain& chain);

struct ThetaSample {
  double theta = 0;
  double lambda = 0;
  double renyi = 0;
};

struct InfoRates {
  double entropy = 0;
  double varentropy = 0;
  std::vector<ThetaSample> theta_samples;  // the extrapolation grid
};

InfoRates info_rates(const NonHiddenChain& chain);

}  // namespace jscc::markov
