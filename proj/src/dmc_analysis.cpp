#include "jscc/dmc_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace jscc::dmc {

namespace {

void check_input_dist(const Eigen::VectorXd& p, int n) {
  if (static_cast<int>(p.size()) != n) {
    throw DomainError("input distribution size does not match the channel");
  }
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    if (!(p(i) >= 0) || !std::isfinite(p(i))) {
      throw DomainError("input distribution has a negative or non-finite "
                        "entry");
    }
    sum += p(i);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "input distribution sums to " << sum;
    throw DomainError(os.str());
  }
}

// D(W_x || q) over the output alphabet; q must dominate W_x.
double row_divergence(const DmcChannel& ch, int x, const Eigen::VectorXd& q) {
  double d = 0;
  for (int y = 0; y < ch.num_outputs(); ++y) {
    double p = ch.w(x, y);
    if (p > 0) d += p * std::log(p / q(y));
  }
  return d;
}

double row_info_variance(const DmcChannel& ch, int x,
                         const Eigen::VectorXd& q) {
  double d = row_divergence(ch, x, q);
  double v = 0;
  for (int y = 0; y < ch.num_outputs(); ++y) {
    double p = ch.w(x, y);
    if (p > 0) {
      double dev = std::log(p / q(y)) - d;
      v += p * dev * dev;
    }
  }
  return v;
}

}  // namespace

void validate_channel(const DmcChannel& ch, double tol) {
  const int nx = ch.num_inputs();
  const int ny = ch.num_outputs();
  if (nx == 0 || ny == 0) {
    throw NonStochasticError("channel matrix must be nonempty");
  }
  for (int x = 0; x < nx; ++x) {
    double sum = 0;
    for (int y = 0; y < ny; ++y) {
      double p = ch.w(x, y);
      if (!std::isfinite(p) || p < 0) {
        std::ostringstream os;
        os << "entry W(" << y << "|" << x << ") = " << p
           << " is not a probability";
        throw NonStochasticError(os.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "row " << x << " sums to " << sum << ", expected 1 within " << tol;
      throw NonStochasticError(os.str());
    }
  }
}

Eigen::VectorXd output_distribution(const Eigen::VectorXd& p,
                                    const DmcChannel& ch) {
  check_input_dist(p, ch.num_inputs());
  return ch.w.transpose() * p;
}

double mutual_information(const Eigen::VectorXd& p, const DmcChannel& ch) {
  check_input_dist(p, ch.num_inputs());
  Eigen::VectorXd q = ch.w.transpose() * p;
  double info = 0;
  for (int x = 0; x < ch.num_inputs(); ++x) {
    if (p(x) > 0) info += p(x) * row_divergence(ch, x, q);
  }
  return info;
}

double channel_dispersion(const Eigen::VectorXd& p, const DmcChannel& ch) {
  check_input_dist(p, ch.num_inputs());
  Eigen::VectorXd q = ch.w.transpose() * p;
  double v = 0;
  for (int x = 0; x < ch.num_inputs(); ++x) {
    if (p(x) > 0) v += p(x) * row_info_variance(ch, x, q);
  }
  return v;
}

CapacityResult capacity(const DmcChannel& ch, double gap_tol,
                        double support_tol) {
  validate_channel(ch);
  const int nx = ch.num_inputs();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(nx, 1.0 / nx);
  Eigen::VectorXd d(nx);

  const long cap_iters = 2000000;
  double upper = 0, lower = 0;
  bool converged = false;
  for (long it = 0; it < cap_iters; ++it) {
    Eigen::VectorXd q = ch.w.transpose() * p;
    upper = -std::numeric_limits<double>::infinity();
    lower = 0;
    for (int x = 0; x < nx; ++x) {
      d(x) = row_divergence(ch, x, q);
      upper = std::max(upper, d(x));
      lower += p(x) * d(x);
    }
    if (upper - lower < gap_tol) {
      converged = true;
      break;
    }
    double norm = 0;
    for (int x = 0; x < nx; ++x) {
      p(x) *= std::exp(d(x) - upper);  // shift keeps the exponent bounded
      norm += p(x);
    }
    p /= norm;
  }
  if (!converged) {
    throw NonConvergenceError(
        "Blahut-Arimoto hit the iteration cap before closing the duality "
        "gap");
  }

  CapacityResult res;
  res.capacity = 0.5 * (upper + lower);
  res.input = p;
  res.saddle_output = ch.w.transpose() * p;
  res.slack = Eigen::VectorXd(nx);
  for (int x = 0; x < nx; ++x) {
    res.slack(x) = res.capacity - d(x);
    if (res.slack(x) < support_tol) res.support.push_back(x);
  }
  return res;
}

namespace {

// maximize c.x subject to A x = b, x >= 0: dense two-phase tableau simplex
// with Bland's rule. Problems here have at most ~a dozen variables.
struct LpResult {
  double value = 0;
  Eigen::VectorXd x;
};

LpResult simplex_max(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in,
                     const Eigen::VectorXd& c_in, double tol) {
  int m = static_cast<int>(a_in.rows());
  const int n = static_cast<int>(a_in.cols());

  // Tableau [A | I | b] with artificial basis; rows flipped so b >= 0.
  Eigen::MatrixXd t(m, n + m + 1);
  for (int i = 0; i < m; ++i) {
    double sgn = b_in(i) < 0 ? -1.0 : 1.0;
    t.row(i).head(n) = sgn * a_in.row(i);
    t.row(i).segment(n, m).setZero();
    t(i, n + i) = 1.0;
    t(i, n + m) = sgn * b_in(i);
  }
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  auto pivot = [&](int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i < m; ++i) {
      if (i != row && std::abs(t(i, col)) > 0) {
        t.row(i) -= t(i, col) * t.row(row);
      }
    }
    basis[row] = col;
  };

  // One simplex phase: maximize cost over columns [0, ncols).
  auto run_phase = [&](const Eigen::VectorXd& cost, int ncols) {
    for (long guard = 0; guard < 100000; ++guard) {
      // Reduced costs from the current basis.
      Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
      for (int i = 0; i < m; ++i) lambda(i) = cost(basis[i]);
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        double red = cost(j) - lambda.dot(t.col(j).head(m));
        if (red > tol) {
          enter = j;  // Bland: smallest improving index
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      // The rhs stays in the last column even after redundant rows are
      // dropped and m shrinks, so index it from the tableau width.
      const int bcol = static_cast<int>(t.cols()) - 1;
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) > tol) {
          double ratio = t(i, bcol) / t(i, enter);
          if (ratio < best_ratio - 1e-15 ||
              (ratio < best_ratio + 1e-15 &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        throw OptimizationFailureError("simplex detected an unbounded ray on "
                                       "a bounded polytope");
      }
      pivot(leave, enter);
    }
    throw OptimizationFailureError("simplex cycled past its pivot guard");
  };

  // Phase 1: drive the artificials to zero.
  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n + m);
  for (int j = n; j < n + m; ++j) cost1(j) = -1.0;
  run_phase(cost1, n + m);
  double infeas = 0;
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) infeas += t(i, n + m);
  }
  if (infeas > 1e-9) {
    std::ostringstream os;
    os << "no feasible point: residual infeasibility " << infeas;
    throw InfeasiblePolytopeError(os.str());
  }
  // Pivot lingering artificials out where possible; drop redundant rows.
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) {
      int col = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(t(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) pivot(i, col);
    }
  }
  {
    std::vector<int> keep;
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n) keep.push_back(i);
    }
    if (static_cast<int>(keep.size()) < m) {
      Eigen::MatrixXd t2(keep.size(), t.cols());
      std::vector<int> basis2;
      for (size_t k = 0; k < keep.size(); ++k) {
        t2.row(k) = t.row(keep[k]);
        basis2.push_back(basis[keep[k]]);
      }
      t = t2;
      basis = basis2;
      m = static_cast<int>(keep.size());
    }
  }

  // Phase 2 over the original variables only.
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(t.cols() - 1);
  cost2.head(n) = c_in;
  run_phase(cost2, n);

  LpResult res;
  res.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) res.x(basis[i]) = t(i, t.cols() - 1);
  }
  res.value = c_in.dot(res.x);
  return res;
}

}  // namespace

DispersionExtremes dispersion_extremes(const DmcChannel& ch,
                                       const CapacityResult& cap) {
  const int ny = ch.num_outputs();
  const int ns = static_cast<int>(cap.support.size());
  if (ns == 0) {
    throw InfeasiblePolytopeError("empty support classification");
  }

  // Variables: input mass on the classified support. Constraints: induced
  // output law plus total mass one (redundant but harmless; phase 1 absorbs
  // it). The saddle output itself is only consistent up to the capacity
  // iteration's final gap, so the right-hand side is anchored at the output
  // induced by the support-restricted optimal input: that point is feasible
  // by construction and sits within the iteration residual of the saddle.
  Eigen::MatrixXd a(ny + 1, ns);
  for (int y = 0; y < ny; ++y) {
    for (int k = 0; k < ns; ++k) a(y, k) = ch.w(cap.support[k], y);
  }
  a.row(ny).setOnes();

  Eigen::VectorXd p_anchor(ns);
  for (int k = 0; k < ns; ++k) {
    p_anchor(k) = std::max(0.0, cap.input(cap.support[k]));
  }
  const double anchor_mass = p_anchor.sum();
  if (anchor_mass <= 0) {
    throw InfeasiblePolytopeError(
        "optimal input carries no mass on the classified support");
  }
  p_anchor /= anchor_mass;

  Eigen::VectorXd b(ny + 1);
  b.head(ny) = a.topRows(ny) * p_anchor;
  b(ny) = 1.0;

  // A legitimate anchor sits within the iteration residual of the saddle
  // (observed ~1e-8 at the default gap target); anything beyond 1e-5 means
  // the support list does not belong to this saddle at all.
  const double mismatch =
      (b.head(ny) - cap.saddle_output).lpNorm<Eigen::Infinity>();
  if (mismatch > 1e-5) {
    std::ostringstream os;
    os << "support cannot reproduce the saddle output: anchored residual "
       << mismatch;
    throw InfeasiblePolytopeError(os.str());
  }

  // The same anchored law serves as the reference measure of the objective,
  // keeping the program consistent to machine precision.
  const Eigen::VectorXd q_ref = b.head(ny);
  Eigen::VectorXd v(ns);
  for (int k = 0; k < ns; ++k) {
    v(k) = row_info_variance(ch, cap.support[k], q_ref);
  }

  LpResult hi = simplex_max(a, b, v, 1e-11);
  LpResult lo = simplex_max(a, b, Eigen::VectorXd(-v), 1e-11);

  DispersionExtremes ext;
  ext.v_plus = hi.value;
  ext.v_minus = -lo.value;
  if (ext.v_minus > ext.v_plus) std::swap(ext.v_minus, ext.v_plus);
  ext.p_plus = Eigen::VectorXd::Zero(ch.num_inputs());
  ext.p_minus = Eigen::VectorXd::Zero(ch.num_inputs());
  for (int k = 0; k < ns; ++k) {
    ext.p_plus(cap.support[k]) = std::max(0.0, hi.x(k));
    ext.p_minus(cap.support[k]) = std::max(0.0, lo.x(k));
  }
  ext.p_plus /= ext.p_plus.sum();
  ext.p_minus /= ext.p_minus.sum();

  for (const Eigen::VectorXd* p : {&ext.p_plus, &ext.p_minus}) {
    double drift =
        (ch.w.transpose() * *p - b.head(ny)).lpNorm<Eigen::Infinity>();
    if (drift > 1e-9) {
      std::ostringstream os;
      os << "optimal vertex drifts off the anchored output by " << drift;
      throw OptimizationFailureError(os.str());
    }
  }
  return ext;
}

}  // namespace jscc::dmc
