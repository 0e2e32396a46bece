#pragma once

#include "v2dm/basis.hpp"
#include "v2dm/carrier.hpp"
#include "v2dm/constraints.hpp"
#include "v2dm/maps.hpp"
#include "v2dm/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace v2dm {

/**
 * One assembled SDP instance: the reduced Hamiltonian, the condition set,
 * optional linear equalities / inequalities and the nonlinear hopping floor,
 * together with the derived data every solver needs (homogenized inequality
 * matrices, an orthonormal equality basis including the trace, the feasible
 * affine center, and projectors).
 */
struct SDPProblem {
  Spaces sp;
  ConditionSet cs;
  Mat h2;

  std::vector<LinearEquality> equalities;    ///< extra equalities (trace excluded)
  std::vector<LinearInequality> inequalities;
  std::optional<NonlinHopping> nonlin;

  // Derived by finalize():
  std::vector<Mat> c0;       ///< homogenized inequality matrices
  std::vector<Mat> c0t;      ///< their traceless parts (overlap machinery)
  std::vector<Mat> etil;     ///< orthonormal span of {I, E_1, ...}; etil[0] ~ I
  std::vector<double> etval; ///< targets in the orthonormal basis
  Mat gamma_center;          ///< sum_n etval_n etil_n, satisfies all equalities
  int equality_rank = 1;     ///< retained equality directions (incl. trace)

  SDPProblem(int M, int N, const ConditionSet& conds, Mat h2_in);

  /// Orthonormalizes equalities, homogenizes inequalities, builds the center.
  void finalize();

  /// Orthogonal projector onto the tangent space of all equalities.
  Mat project(const Mat& a) const;

  /// Carrier-space dimension n entering duality gaps: block dims plus one
  /// per inequality plus one for the hopping floor when active.
  int barrier_dimension() const;

  Carrier apply_L(const Mat& g2) const { return apply_conditions(g2, cs, sp, &c0); }
  Mat collapse_L(const Carrier& a) const { return collapse(a, sp, &c0); }
};

/// Assembles and finalizes a problem from model-level inputs.
SDPProblem make_problem(const Hamiltonian& H, int N, const ConditionSet& cs,
                        std::optional<double> spin,
                        bool singlet_projection,
                        const std::vector<LinearInequality>& extra_ineq,
                        std::optional<NonlinHopping> nonlin);

/// One row of the per-iteration trace table.
struct TraceRow {
  std::vector<std::pair<std::string, double>> cols;
};

/// Common solver result: objective, optimality measures and the primal
/// estimate Gamma accumulated by the run.
struct SolverReport {
  double energy = 0.0;             ///< <Gamma, H2> at the returned point
  double gap = 0.0;                ///< duality gap estimate (barrier solvers)
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  int iterations = 0;              ///< outer iterations
  int newton_steps = 0;            ///< inner steps where applicable
  long matvecs = 0;                ///< conjugate-gradient applications
  bool converged = false;
  std::string termination;         ///< "converged", "iteration-limit", ...
  Mat gamma;                       ///< primal two-body matrix estimate
  double primal_bound = 0.0;       ///< certified lower bound when available
  std::vector<TraceRow> trace;
};

/// Solver tuning knobs shared across the three algorithms.
struct SolverOptions {
  double tol = 1e-6;          ///< per-dimension duality gap / infeasibility target
  int max_iter = 20000;
  unsigned long seed = 1;
  bool collect_trace = false;
  // Dual path-following:
  double t_init = 1.0;
  double t_shrink = 0.3;
  double newton_tol = 1e-7;
  // Boundary-point:
  double sigma0 = 1.0;
  double sigma_scale = 1.05;
  int stagnation_window = 2000;
};

}  // namespace v2dm
