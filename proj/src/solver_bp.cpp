#include "v2dm/solvers.hpp"

#include "solver_common.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace v2dm {

using detail::frob_inner;
using detail::carrier_axpy;

/**
 * Boundary-point method.  Each pass solves one overlap system for the pair
 * matrix increment d, splits W = u0 + L(d) - X/sigma into its positive part
 * (the dual slack Z) and scaled negative part (the new primal certificate
 * X), and rebalances sigma against the two infeasibilities.
 */
SolverReport solve_bp(const SDPProblem& prob, const SolverOptions& opt) {
  if (prob.nonlin)
    throw std::invalid_argument("boundary-point solver does not support the nonlinear hopping floor");

  const Mat& h2 = prob.h2;
  const int m_ineq = static_cast<int>(prob.c0.size());
  const double e_center = frob_inner(prob.gamma_center, h2);
  const double scale = 1.0 + h2.norm();

  detail::TangentSolver ts(prob);
  const std::vector<detail::BlockPartition> parts = detail::detect_partitions(prob, ts);

  Carrier u0 = prob.apply_L(prob.gamma_center);
  Carrier X = Carrier::zero(prob.cs, prob.sp.dims, m_ineq);
  Carrier Z = X;
  Mat d = Mat::Zero(h2.rows(), h2.cols());

  SolverReport rep;
  double sigma = opt.sigma0;
  double best_merit = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int it = 1; it <= opt.max_iter; ++it) {
    // Overlap system for the pair-space increment.
    Carrier rhs_c = carrier_axpy(1.0 / sigma, X, carrier_axpy(-1.0, u0, Z));
    Mat rhs = prob.project(collapse(rhs_c, prob.sp, &prob.c0) - h2 / sigma);
    d = ts.solve(rhs);

    // Split W by eigenvalue sign: Z keeps the positive part, the scaled
    // negative part becomes the next primal certificate.
    Carrier W = carrier_axpy(-1.0 / sigma, X, carrier_axpy(1.0, prob.apply_L(d), u0));
    Carrier V = W;
    for (std::size_t k = 0; k < W.blocks.size(); ++k) {
      Z.blocks[k].second = detail::positive_part(W.blocks[k].second, parts[k]);
      V.blocks[k].second = sigma * (Z.blocks[k].second - W.blocks[k].second);
    }
    for (int j = 0; j < m_ineq; ++j) {
      Z.ineq(j) = std::max(W.ineq(j), 0.0);
      V.ineq(j) = sigma * std::max(-W.ineq(j), 0.0);
    }

    double primal_infeas = prob.project(collapse(V, prob.sp, &prob.c0) - h2).norm();
    double dual_infeas = carrier_norm(carrier_axpy(-1.0, V, X)) / sigma;
    X = V;

    double energy = e_center + frob_inner(d, h2);
    rep.iterations = it;
    rep.primal_infeas = primal_infeas;
    rep.dual_infeas = dual_infeas;
    rep.energy = energy;
    if (opt.collect_trace) {
      TraceRow row;
      row.cols = {{"iter", double(it)},
                  {"sigma", sigma},
                  {"primal_infeas", primal_infeas},
                  {"dual_infeas", dual_infeas},
                  {"energy", energy}};
      rep.trace.push_back(std::move(row));
    }

    double merit = std::max(primal_infeas, dual_infeas);
    if (merit <= opt.tol * scale) {
      rep.converged = true;
      rep.termination = "converged";
      break;
    }
    if (merit < 0.995 * best_merit) {
      best_merit = merit;
      since_best = 0;
    } else if (++since_best >= opt.stagnation_window) {
      rep.termination = "stagnation";
      break;
    }
    if (dual_infeas > 1.1 * primal_infeas)
      sigma *= opt.sigma_scale;
    else if (primal_infeas > 1.1 * dual_infeas)
      sigma /= opt.sigma_scale;
  }
  if (rep.termination.empty()) rep.termination = "iteration-limit";

  rep.gamma = prob.gamma_center + d;
  rep.energy = e_center + frob_inner(d, h2);
  rep.primal_bound = e_center - carrier_inner(X, u0);
  rep.gap = std::abs(rep.energy - rep.primal_bound);
  rep.matvecs = ts.matvecs;
  return rep;
}

}  // namespace v2dm
