#pragma once

#include "v2dm/basis.hpp"
#include "v2dm/carrier.hpp"

#include <memory>
#include <vector>

namespace v2dm {

/**
 * Coefficients of a generalized Q map
 *
 *   gq(Gamma) = a Gamma + b (2 tb_trace Gamma) I - c D(partial_trace Gamma),
 *
 * the closed family containing every condition overlap sum L^T L.
 */
struct GQCoeffs {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;

  GQCoeffs& operator+=(const GQCoeffs& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    return *this;
  }
};

/// Applies the map.
Mat gq_apply(const GQCoeffs& co, const Mat& g2, const PairBasis& pb);

/// Coefficients of sum_k L_k^T L_k for an analytic condition set; throws
/// std::invalid_argument when a Gutzwiller condition is present (no closed
/// form, use OverlapInverse).
GQCoeffs coeffs_for(const ConditionSet& cs, int M, int N);

/// Coefficients of the inverse map (exists for the overlap of any
/// nonempty condition set).
GQCoeffs gq_invert(const GQCoeffs& co, int M);

/**
 * Solves  [gq + sum_j <., C0_j> C0_j] (Gamma) = Q  for Gamma, with C0_j the
 * traceless parts of homogenized inequality matrices.  Reduces to a dense
 * (2m+1)-dimensional linear system in the contracted unknowns (full trace,
 * the inequality overlaps, and the partial-trace overlaps), then back-
 * substitutes.  Exact up to roundoff.
 */
class ExtOverlapInverse {
 public:
  ExtOverlapInverse(const GQCoeffs& co, std::vector<Mat> c0, const PairBasis& pb);

  Mat solve(const Mat& q) const;
  Mat forward(const Mat& g2) const;  ///< the extended map itself

 private:
  GQCoeffs co_;
  std::vector<Mat> c0_;
  std::vector<Mat> c0bar_;      ///< partial traces
  Vec c0ddbar_;                 ///< full traces (2 tb_trace)
  Mat sys_;                     ///< (2m+1) x (2m+1) contracted system
  Eigen::PartialPivLU<Mat> lu_;
  const PairBasis* pb_;
  double kappa_, mu_, lambda_;
};

/**
 * Overlap inverse for a full condition set.  Analytic sets use the gq /
 * extended machinery directly; sets with Gutzwiller conditions fall back to
 * conjugate gradients on the trace-projected overlap with the analytic part
 * as preconditioner.
 */
class OverlapInverse {
 public:
  OverlapInverse(const ConditionSet& cs, const Spaces& sp, std::vector<Mat> c0,
                 double cg_tol = 1e-10, int cg_maxit = 500);

  /// S(Gamma) composed from the condition maps and their adjoints.
  Mat forward(const Mat& g2) const;

  /// S^{-1} Q (analytic path), or the trace-projected solve (CG path; input
  /// and output are then projected traceless).
  Mat solve(const Mat& q) const;

  bool analytic() const { return analytic_; }
  int last_iterations() const { return last_iters_; }

 private:
  const Spaces* sp_;
  ConditionSet cs_;
  std::vector<Mat> c0_;
  bool analytic_;
  GQCoeffs co_;                      ///< analytic part (Gutzwiller excluded)
  std::unique_ptr<ExtOverlapInverse> ext_;
  double cg_tol_;
  int cg_maxit_;
  mutable int last_iters_ = 0;
};

}  // namespace v2dm
