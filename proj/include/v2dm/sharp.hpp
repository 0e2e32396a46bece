#pragma once

#include "v2dm/basis.hpp"
#include "v2dm/constraints.hpp"

#include <utility>
#include <vector>

namespace v2dm {

/**
 * Canonical form of a skew pair amplitude B: orbital rotation U and level
 * amplitudes x with  B = U^T blkdiag([[0, x_k/sqrt(2)], [-x_k/sqrt(2)], 0]]) U,
 * so that B+ = sum_ab B_ab a+_a a+_b equals (1/sqrt2) sum_k x_k b+_k with
 * b+_k the rotated level pair-creation operators.  x_k >= 0 descending.
 */
struct CanonicalPairs {
  Mat U;   ///< M x M orthogonal
  Vec x;   ///< M/2 level amplitudes
};
CanonicalPairs canonical_pairing_form(const Mat& B);

/**
 * Largest eigenvalue of B+B on N particles from the level amplitudes x:
 * seniority-zero Richardson diagonalization with n = N/2 pairs (for odd N
 * one level is blocked and the best choice is taken).  Also usable for
 * N + 2 in the two-hole search.
 */
double richardson_lambda_max(const Vec& x, int N);

/// Rapidities of the maximal root for n pairs (n >= 2); empty for n < 2.
Vec richardson_rapidities(const Vec& x, int n, const std::vector<int>& blocked = {});

/// Gradient d lambda_max / d x by implicit differentiation of the Richardson
/// equations (matches finite differences to ~1e-6 relative).
Vec dlambda_dx(const Vec& x, int N);

/// Lifted pair matrix W with <B+ B> = tb_inner(Gamma, W): W = 4 vecB vecB^T
/// over ordered slots.
Mat pair_operator_lift(const Mat& B, const PairBasis& pb);

/**
 * Violation functionals for sharp bound search, normalized by tr B^T B:
 *   F_I(B) = [lambda_max_N(x(B)) - <Gamma, W>] / |B|_F^2
 *   F_Q(B) = [lambda_max_{N+2}(x(B)) - <Gamma, Q(W)>] / |B|_F^2
 * Negative values witness violated exact pair-operator bounds.
 */
double sharp_violation_I(const Mat& B, const Mat& g2, const Spaces& sp);
double sharp_violation_Q(const Mat& B, const Mat& g2, const Spaces& sp);

/// Nonlinear conjugate-gradient search for the most violated pair bound.
/// Returns the best B and its violation value (restarts from random skew
/// matrices, deterministic under seed).
struct SharpSearchResult {
  Mat B;
  double violation;
};
SharpSearchResult sharp_search_I(const Mat& g2, const Spaces& sp, int restarts,
                                 unsigned long seed);
SharpSearchResult sharp_search_Q(const Mat& g2, const Spaces& sp, int restarts,
                                 unsigned long seed);

/// Inequality <Gamma, C> >= c cutting off the violation found by a search:
/// C = -W (or -Q^T(W) for the two-hole form), c = -lambda_max.
LinearInequality emit_sharp_inequality(const Mat& B, const Spaces& sp, bool two_hole);

/**
 * Exact extremes of <(B+hat B hat)> for SYMMETRIC B (number-conserving
 * one-body operator squared): E_max from the N most positive / negative
 * eigenvalue sums, E_min by exhaustive occupation search (C(M,N) <= 1e5).
 */
std::pair<double, double> sharp_G_bounds(const Mat& B, int N);

}  // namespace v2dm
