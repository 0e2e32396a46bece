#pragma once

#include "v2dm/basis.hpp"

#include <vector>

namespace v2dm {

/// Linear equality <Gamma, E> = e (ordered-slot inner product).
struct LinearEquality {
  Mat E;
  double e;
};

/// Linear inequality <Gamma, C> >= c.
struct LinearInequality {
  Mat C;
  double c;
};

/// Homogenized form C0 = C - (2c/(N(N-1))) I so that <Gamma, C0> >= 0 on the
/// trace-normalized set.
Mat homogenize_inequality(const LinearInequality& iq, int M, int N);

/**
 * Equality pinning the total spin: <Gamma, E> = S(S+1) with
 * E = D((3/4) I)/(N-1) + V_spin, V_spin the antisymmetrized matrix elements
 * of 2 s1.s2 (diagonal +1/2 parallel spins, -1/2 antiparallel, +1 spin flip
 * on a shared site pair).
 */
LinearEquality spin_squared_equality(int M, int N, double S);

/**
 * Singlet ground states obey G(Gamma) v_z = 0 with v_z the particle-hole
 * vector (gd) -> delta_{gd} s_g (s = +-1/2).  Returns one equality per row,
 * E_(ab) = G^T(sym(e_(ab) v_z^T)), e = 0; the set is linearly dependent and
 * callers orthonormalize (the surviving rank is reported by the problem
 * assembly).
 */
std::vector<LinearEquality> singlet_projection_equalities(int M, int N);

/**
 * Data for the exact kinetic-energy floor as a function of the double
 * occupancy fraction p = <Gamma, P_D> (P_D selects on-site pair slots):
 * T0 = unrestricted hopping minimum, Tinf = singly-occupied minimum,
 * T the lifted hopping matrix D(t_hop)/(N-1).
 */
struct NonlinHopping {
  Mat T;      ///< lifted hopping, d2 x d2
  Mat P;      ///< on-site pair selector, d2 x d2 diagonal
  double T0;
  double Tinf;
  double p_branch;  ///< c/(1+c), c = ((Tinf-T0)/(2 T0))^2
};

/// Lower envelope f*(p) of the kinetic floor, its slope g and curvature h.
/// Active branch for p <= p_branch; constant T0 beyond it.
double nonlin_f_star(const NonlinHopping& nl, double p);
double nonlin_g(const NonlinHopping& nl, double p);
double nonlin_h(const NonlinHopping& nl, double p);

/// Assembles the hopping-floor data for a Hubbard chain (uses exact minima).
NonlinHopping build_nonlin_hopping(int L, double t, int N);

}  // namespace v2dm
