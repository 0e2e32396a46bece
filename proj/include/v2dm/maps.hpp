#pragma once

#include "v2dm/basis.hpp"
#include "v2dm/carrier.hpp"

#include <vector>

namespace v2dm {

/// One-particle density from the pair matrix: rho = partial_trace(Gamma)/(N-1).
Mat rho_from_gamma(const Mat& g2, const Spaces& sp);

/// Two-hole map  Q = hom I + Gamma - D(rho),  hom = 2 tb_trace(Gamma)/(N(N-1)).
Mat map_Q(const Mat& g2, const Spaces& sp);

/// Particle-hole map G_(ab);(gd) = delta_bd rho_ag - Gamma_{ad;gb}, M^2 x M^2.
Mat map_G(const Mat& g2, const Spaces& sp);

/// G minus the separable piece: G' = G - vec(rho) vec(rho)^T.
Mat map_G_prime(const Mat& g2, const Spaces& sp);

/// Three-particle anticommutator maps on ordered triples / pair-hole indices.
Mat map_T1(const Mat& g2, const Spaces& sp);
Mat map_T2(const Mat& g2, const Spaces& sp);

/// T2 bordered by the pair-vector block w_(ab)g;n = Gamma_{ab;ng} and rho.
Mat map_T2prime(const Mat& g2, const Spaces& sp);

/// Projected one-body maps for the Gutzwiller conditions (partner = a XOR 1).
Mat map_gutz_rho(const Mat& g2, const Spaces& sp);
Mat map_gutz_q(const Mat& g2, const Spaces& sp);

/// Dispatch by condition label.
Mat apply_cond(Cond c, const Mat& g2, const Spaces& sp);

/// Adjoints under <L(Gamma), A> = <Gamma, L^T(A)> with ordered-slot inner
/// products on both sides; outputs are symmetric d2 x d2 matrices.
Mat adj_Q(const Mat& a, const Spaces& sp);
Mat adj_G(const Mat& a, const Spaces& sp);
Mat adj_G_prime_linear(const Mat& a, const Spaces& sp);  ///< adjoint of the linear part (= adj_G)
Mat adj_T1(const Mat& a, const Spaces& sp);
Mat adj_T2(const Mat& a, const Spaces& sp);
Mat adj_T2prime(const Mat& a, const Spaces& sp);
Mat adj_gutz_rho(const Mat& a, const Spaces& sp);
Mat adj_gutz_q(const Mat& a, const Spaces& sp);
Mat adj_cond(Cond c, const Mat& a, const Spaces& sp);

/// All condition blocks of one pair matrix; when C0 is given the inequality
/// entries <Gamma, C0_j> are filled in as well.
Carrier apply_conditions(const Mat& g2, const ConditionSet& cs, const Spaces& sp,
                         const std::vector<Mat>* C0 = nullptr);

/// Adjoint of apply_conditions: sum of block adjoints plus inequality terms.
Mat collapse(const Carrier& a, const Spaces& sp, const std::vector<Mat>* C0 = nullptr);

}  // namespace v2dm
