#pragma once

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace v2dm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/**
 * Dimensions of the index spaces attached to M orbitals and N particles.
 */
struct BasisDims {
  int M;     ///< single-particle orbitals
  int N;     ///< particles
  int d2;    ///< ordered pairs, M(M-1)/2
  int d3;    ///< ordered triples, M(M-1)(M-2)/6
  int dph;   ///< particle-hole products, M^2
  int dpph;  ///< (ordered pair) x (third index), d2*M
};

/// Validates 2 <= N < M and fills the derived dimensions.
BasisDims basis_dims(int M, int N);

/**
 * Lexicographic enumeration of the ordered orbital pairs a < b.
 *
 * Two-particle matrices are stored over these slots; the antisymmetric
 * four-index picture is recovered through slot() and phase().
 */
class PairBasis {
 public:
  explicit PairBasis(int M);

  int orbitals() const { return M_; }
  int size() const { return d2_; }

  /// Slot of the unordered pair {a,b}; a != b required.
  int slot(int a, int b) const { return slot_(a, b); }

  /// Sign picked up by sorting (a,b): +1 if a < b, -1 otherwise.
  static double phase(int a, int b) { return a < b ? 1.0 : -1.0; }

  /// The ordered pair stored in a slot.
  const std::pair<int, int>& pair(int s) const { return pairs_[s]; }

 private:
  int M_;
  int d2_;
  Eigen::MatrixXi slot_;
  std::vector<std::pair<int, int>> pairs_;
};

/// (slot, phase) of an orbital pair; throws std::domain_error on a == b
/// or out-of-range orbitals.
std::pair<int, double> pair_index(const PairBasis& pb, int a, int b);

/**
 * Lexicographic enumeration of ordered orbital triples a < b < c,
 * with the permutation sign for unsorted accessors.
 */
class TripleBasis {
 public:
  explicit TripleBasis(int M);

  int orbitals() const { return M_; }
  int size() const { return d3_; }

  int slot(int a, int b, int c) const { return slot_[(a * M_ + b) * M_ + c]; }

  /// Sign of the permutation sorting (a,b,c); 0 if two indices coincide.
  static double phase(int a, int b, int c);

  const std::array<int, 3>& triple(int s) const { return triples_[s]; }

 private:
  int M_;
  int d3_;
  std::vector<int> slot_;
  std::vector<std::array<int, 3>> triples_;
};

/// Composite index into the pair (x) third-orbital space of the T2 map.
inline int pph_index(int pair_slot, int c, int M) { return pair_slot * M + c; }

/// Trace over ordered pair slots: sum_{a<b} A_{ab;ab}.  Equals the
/// half-weighted full-index sum; N(N-1)/2 on a normalized 2DM.
inline double tb_trace(const Mat& A) { return A.trace(); }

/// Frobenius product over ordered slots; with both arguments symmetric this
/// is the physical pairing, e.g. tb_inner(Gamma, H2) is the total energy.
inline double tb_inner(const Mat& A, const Mat& B) {
  return A.cwiseProduct(B).sum();
}

/// A minus its trace component: A - (2 tb_trace(A)/(M(M-1))) 1.
Mat project_traceless(const Mat& A, int M);

/**
 * Embedding of a one-body matrix m into pair space:
 *
 *   D(m)_{ab;cd} = d_{ac} m_{bd} - d_{ad} m_{bc} - d_{bc} m_{ad} + d_{bd} m_{ac}
 *
 * evaluated on ordered slots.  The same delta-weighted combination appears in
 * the Q map, the reduced Hamiltonian and every generalized Q map.
 */
Mat pair_embed(const Mat& m, const PairBasis& pb);

/// One-index partial trace of a pair-space matrix: out_{ac} = sum_b A_{ab;cb}
/// over the full antisymmetric extension.  tr(out) = 2 tb_trace(A).
Mat partial_trace(const Mat& A, const PairBasis& pb);

/**
 * Shared index machinery for one (M, N) problem: dimensions plus the pair
 * and triple enumerations.  Passed by const reference through the map,
 * overlap and solver layers.
 */
struct Spaces {
  BasisDims dims;
  PairBasis pb;
  TripleBasis tb;

  Spaces(int M, int N) : dims(basis_dims(M, N)), pb(M), tb(M) {}

  int M() const { return dims.M; }
  int N() const { return dims.N; }
};

}  // namespace v2dm
