#pragma once

#include "v2dm/basis.hpp"
#include "v2dm/constraints.hpp"

#include <string>
#include <utility>
#include <vector>

namespace v2dm {

/**
 * One- plus two-body Hamiltonian
 *
 *   H = sum_{ab} t_{ab} a+_a a_b  +  sum_{p,q} V_{pq} a+_a a+_b a_d a_c
 *
 * with p = (a<b), q = (c<d) ordered pair slots and V the antisymmetrized
 * elements <ab|v|cd> - <ab|v|dc>.  With this storage the exact energy is
 * tr(t rho) + tb_inner(Gamma, V).
 */
struct Hamiltonian {
  int M;
  std::string label;
  Mat t;  ///< M x M, symmetric
  Mat V;  ///< d2 x d2, symmetric

  Hamiltonian(int M_, std::string label_ = "");

  /// Adds v * a+_a a_b (plus the transpose element when a != b is wanted,
  /// callers add both orders themselves).
  void add_one_body(int a, int b, double v);

  /// Adds v * a+_a a+_b a_d a_c for arbitrary index orders (a!=b, c!=d).
  void add_two_body(int a, int b, int c, int d, double v);
};

/**
 * Two-particle reduction of H for fixed N:
 *
 *   H2 = D(t)/(N-1) + V,
 *
 * where D is the pair embedding; tb_inner(Gamma, H2) equals <H> for any
 * N-particle state's 2DM.
 */
Mat reduced_hamiltonian(const Hamiltonian& H, int N);

/// 1D Hubbard chain, periodic, orbital 2i = site i up / 2i+1 = site i down.
/// Hopping -t between same-spin nearest neighbours, on-site repulsion U.
Hamiltonian hubbard_1d(int L, double t, double U);

/**
 * Reduced BCS pairing Hamiltonian on M = 2*levels orbitals:
 *
 *   H = sum eps_k (n_{2k} + n_{2k+1})
 *       - (g/2) sum_{ab} x_a x_b a+_a a+_abar a_bbar a_b
 *
 * with x per level (x on orbital 2k, -x on 2k+1).
 */
Hamiltonian pairing_hamiltonian(const Vec& eps, double g, const Vec& x);

/// Writes / reads the plain-text problem format: header "M N", then
/// "1B a b value" and "2B a b c d value" lines (a<b, c<d), '#' comments.
void save_problem(const std::string& path, const Hamiltonian& H, int N);
std::pair<Hamiltonian, int> load_problem(const std::string& path);

/// Text dump of a two-body matrix: header "M N d2", then d2 x d2 values
/// row-major with 17 significant digits.
void save_two_body(const std::string& path, const Mat& A, int M, int N);

/**
 * An orbital subsystem with its masked Hamiltonian pieces and the exact
 * energy-vs-particle-number table used to build fragment constraints.
 */
struct SubsystemSpec {
  std::vector<int> orbitals;              ///< fragment spin-orbitals
  Mat tV;                                 ///< masked one-body part, full M x M
  Mat VV;                                 ///< masked two-body part, d2 x d2
  std::vector<std::pair<int, double>> table;  ///< (N_k, exact E_k), convex
  int M;                                  ///< total orbital count
};

/// Masks H to a fragment; the energy table still has to be attached.
SubsystemSpec make_subsystem_spec(const Hamiltonian& H, const std::vector<int>& orbitals);

/// H restricted to a subset of orbitals (ascending), re-indexed to 0..k-1.
Hamiltonian restrict_to(const Hamiltonian& H, const std::vector<int>& orbitals);

/**
 * One linear inequality per chord of the fragment's convex E(N) envelope:
 * Tr Gamma C_k >= c_k encodes  tr(t_V rho) + <Gamma, V_V>  >=  a_k Nbar + b_k
 * with Nbar the fragment occupation; jointly they bound the energy by the
 * piecewise-linear envelope.  Throws on a non-convex table.
 */
std::vector<LinearInequality> subsystem_inequalities(const SubsystemSpec& spec, int N_total);

}  // namespace v2dm
