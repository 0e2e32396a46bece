#pragma once

#include "v2dm/problem.hpp"

namespace v2dm {

/**
 * Dual-only path-following: minimizes <Gamma, H2> over the affine slice
 * through the feasible center, with log-det barriers on every condition
 * block, log barriers on linear inequalities, and the exact kinetic-floor
 * barrier when the problem carries one.  Newton steps are solved by
 * preconditioned conjugate gradients in pair space; the returned Gamma is
 * primal-feasible for the relaxation at every iterate.
 */
SolverReport solve_dual_pr(const SDPProblem& prob, const SolverOptions& opt);

/**
 * Primal-dual predictor-corrector on the dual pair (X, Z) with the geometric
 * mean scaling point; linear systems are solved by conjugate gradients in
 * the coefficient space, the proximity measure controls the corrector /
 * predictor alternation.  Reports both primal and dual objectives.
 */
SolverReport solve_pd_pc(const SDPProblem& prob, const SolverOptions& opt);

/**
 * Boundary-point / augmented Lagrangian method: each outer iteration solves
 * one overlap system in pair space, splits the result by sign into (Z, V),
 * and balances primal against dual infeasibility with the penalty sigma.
 */
SolverReport solve_bp(const SDPProblem& prob, const SolverOptions& opt);

}  // namespace v2dm
