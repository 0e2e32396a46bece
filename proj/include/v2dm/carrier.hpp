#pragma once

#include "v2dm/basis.hpp"

#include <string>
#include <vector>

namespace v2dm {

/// N-representability conditions; each one names a linear PSD map of the 2DM.
enum class Cond { I, Q, G, T1, T2, T2P, GutzRho, GutzQ };

std::string cond_name(Cond c);

/**
 * Ordered set of active conditions.  I is always present; T2 and T2P are
 * mutually exclusive (the primed map subsumes the plain one).
 */
class ConditionSet {
 public:
  ConditionSet() : conds_{Cond::I} {}
  explicit ConditionSet(std::vector<Cond> conds);

  /// Parses a comma list like "I,Q,G,T1,T2"; the token GUTZ activates both
  /// Gutzwiller maps.  Throws std::invalid_argument on unknown tokens or a
  /// T2/T2P clash.
  static ConditionSet parse(const std::string& csv);

  const std::vector<Cond>& conds() const { return conds_; }
  bool has(Cond c) const;
  bool has_gutzwiller() const { return has(Cond::GutzRho) || has(Cond::GutzQ); }
  std::string str() const;

 private:
  std::vector<Cond> conds_;
};

/// Square block dimension of one condition's image space.
int cond_block_dim(Cond c, const BasisDims& dims);

/**
 * Direct sum of condition-map images: one dense symmetric block per active
 * condition plus a diagonal vector for linear inequality entries.
 */
struct Carrier {
  std::vector<std::pair<Cond, Mat>> blocks;
  Vec ineq;  ///< zero-length when the problem has no inequalities

  /// All-zero carrier matching a condition set and an inequality count.
  static Carrier zero(const ConditionSet& cs, const BasisDims& dims, int m_ineq);

  int total_dim() const;
  Carrier& operator+=(const Carrier& o);
  Carrier& operator-=(const Carrier& o);
  Carrier& operator*=(double s);
};

/// Sum over blocks of tr(A_k B_k) plus the inequality dot product.
double carrier_inner(const Carrier& A, const Carrier& B);

double carrier_trace(const Carrier& A);

/// Frobenius norm induced by carrier_inner.
double carrier_norm(const Carrier& A);

}  // namespace v2dm
