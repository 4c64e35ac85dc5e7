#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jscc/errors.hpp"

namespace jscc::dmc {

// Row-stochastic channel: w(x, y) = W(y | x), each row sums to one.
struct DmcChannel {
  Eigen::MatrixXd w;

  int num_inputs() const { return static_cast<int>(w.rows()); }
  int num_outputs() const { return static_cast<int>(w.cols()); }
};

void validate_channel(const DmcChannel& ch, double tol = 1e-12);

// Output distribution induced by input law p.
Eigen::VectorXd output_distribution(const Eigen::VectorXd& p,
                                    const DmcChannel& ch);

// I(P, W) = sum_x P(x) D(W_x || PW) in nats, 0 log 0 = 0.
double mutual_information(const Eigen::VectorXd& p, const DmcChannel& ch);

// Conditional variance of the information density,
//   sum_x P(x) sum_y W(y|x) (log(W(y|x)/PW(y)) - D(W_x||PW))^2.
double channel_dispersion(const Eigen::VectorXd& p, const DmcChannel& ch);

struct CapacityResult {
  double capacity = 0;           // nats
  Eigen::VectorXd input;         // Blahut-Arimoto iterate at termination
  Eigen::VectorXd saddle_output; // the unique capacity-achieving output law
  std::vector<int> support;      // inputs with divergence slack < support_tol
  Eigen::VectorXd slack;         // capacity - D(W_x || saddle_output), per x
};

// Blahut-Arimoto to duality gap < gap_tol; capacity is the bracket midpoint,
// so it carries error at most gap_tol/2. Throws NonConvergenceError at the
// iteration cap.
CapacityResult capacity(const DmcChannel& ch, double gap_tol = 1e-10,
                        double support_tol = 1e-7);

struct DispersionExtremes {
  double v_minus = 0;
  double v_plus = 0;
  // One optimal vertex each of the capacity-achieving polytope
  //   {P : supp(P) within support, P W = anchored output},
  // where the anchor is the output induced by the support-restricted
  // optimal input; it matches saddle_output up to the iteration residual.
  Eigen::VectorXd p_minus;
  Eigen::VectorXd p_plus;
};

// Extremes of the (linear-on-the-polytope) dispersion objective by two-phase
// simplex. Throws InfeasiblePolytopeError when the classified support cannot
// reproduce the saddle output (anchored residual above 1e-5, or an optimal
// input with no mass on the support), OptimizationFailureError when the
// optimum drifts off the anchored output by more than 1e-9.
DispersionExtremes dispersion_extremes(const DmcChannel& ch,
                                       const CapacityResult& cap);

}  // namespace jscc::dmc
