#pragma once

#include "v2dm/basis.hpp"
#include "v2dm/model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace v2dm {

/// Occupation-number basis of N-particle determinants over M orbitals,
/// bit masks in ascending numeric order.
class FockBasis {
 public:
  FockBasis(int M, int N);

  int orbitals() const { return M_; }
  int particles() const { return N_; }
  int dim() const { return static_cast<int>(masks_.size()); }
  std::uint64_t mask(int i) const { return masks_[i]; }
  int index(std::uint64_t m) const;  ///< -1 if absent

 private:
  int M_, N_;
  std::vector<std::uint64_t> masks_;
};

/// Fermionic sign of acting with orbital o on mask m (parity of occupied
/// orbitals below o).
double fermi_sign(std::uint64_t m, int o);

/// One elementary operator: creation (dagger) or annihilation on an orbital.
struct FermiOp {
  int orbital;
  bool dagger;
};

/// Applies a product of elementary operators (rightmost acts first) to a
/// state in `from`, returning its image in `to`.  Particle counts must match.
Vec apply_op_string(const Vec& psi, const std::vector<FermiOp>& ops,
                    const FockBasis& from, const FockBasis& to);

/// <psi| op-string |psi> within one sector (equal creation/annihilation count).
double expectation(const Vec& psi, const std::vector<FermiOp>& ops, const FockBasis& fb);

/// Dense Hamiltonian matrix on the sector (small dimensions only).
Mat build_dense_hamiltonian(const Hamiltonian& H, const FockBasis& fb);

/// Hamiltonian action without materializing the matrix.
Vec apply_hamiltonian(const Hamiltonian& H, const FockBasis& fb, const Vec& psi);

struct GroundState {
  double energy;
  Vec psi;
};

/// Exact ground state: dense diagonalization up to dim 4000, Lanczos with
/// full reorthogonalization beyond (dim capped at 2e5).
GroundState exact_ground(const Hamiltonian& H, int N);

/// Two-particle density matrix Gamma_pq = <a+_a a+_b a_d a_c> of a sector state.
Mat exact_2dm(const Vec& psi, const FockBasis& fb);

/// One-particle density matrix rho_ab = <a+_a a_b>.
Mat exact_1dm(const Vec& psi, const FockBasis& fb);

/// Particle-hole matrix G_(ab);(gd) = <a+_a a_b a+_d a_g>, M^2 x M^2.
Mat exact_ph_matrix(const Vec& psi, const FockBasis& fb);

/// Two-hole matrix Q_(ab);(gd) = <a_a a_b a+_d a+_g>, ordered slots.
Mat exact_2hole(const Vec& psi, const FockBasis& fb);

/// Three-index anticommutator Grams on ordered triples / pair-hole indices.
Mat exact_t1_matrix(const Vec& psi, const FockBasis& fb);
Mat exact_t2_matrix(const Vec& psi, const FockBasis& fb);
Mat exact_t2prime_matrix(const Vec& psi, const FockBasis& fb);

/// Projected one-body Grams <g+_a g_b> and <g_a g+_b>, g_b = a_b (1 - n_bbar).
Mat exact_gutz_rho(const Vec& psi, const FockBasis& fb);
Mat exact_gutz_q(const Vec& psi, const FockBasis& fb);

/// <S^2> of a sector state (orbital 2i spin up, 2i+1 down).
double exact_spin_squared(const Vec& psi, const FockBasis& fb);

/// Kinetic minimum of the periodic chain: N lowest spin-doubled band levels.
double hopping_min_full(int L, int N, double t);

/// Kinetic minimum restricted to configurations without double occupancy,
/// by diagonalization inside that subspace.
double hopping_min_singly_occupied(int L, int N, double t);

/// Exact E(N) over a range plus the vertices of its lower convex envelope.
struct EnergyCurve {
  std::vector<int> n;
  std::vector<double> energy;
  std::vector<int> hull;  ///< indices of envelope vertices, increasing n
};
EnergyCurve energy_vs_N(const Hamiltonian& H, int n_min, int n_max);

/// Largest eigenvalue of B+B on the N-particle sector for the pair operator
/// B+ = sum_{ab} B_ab a+_a a+_b (B skew, M = B.rows()).
double pair_op_max_eig(const Mat& B, int N);

}  // namespace v2dm
