#pragma once

#include "v2dm/overlap.hpp"
#include "v2dm/problem.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#ifdef EIGEN_USE_LAPACKE
#include <lapacke.h>
#endif

#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace v2dm {
namespace detail {

inline double frob_inner(const Mat& a, const Mat& b) {
  return a.cwiseProduct(b).sum();
}

/// Full symmetric eigendecomposition, eigenvalues ascending, eigenvectors in
/// the columns of v.  Routes to the divide-and-conquer LAPACK kernel when the
/// build links one; the Eigen solver is the fallback.
inline void sym_eig(const Mat& a, Vec& w, Mat& v) {
#ifdef EIGEN_USE_LAPACKE
  v = a;
  w.resize(a.rows());
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', lapack_int(a.rows()), v.data(),
                     lapack_int(a.rows()), w.data()) == 0)
    return;
#endif
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  w = es.eigenvalues();
  v = es.eigenvectors();
}

/**
 * Factorization of one symmetric PSD block.  Cholesky when the block is
 * safely positive definite; otherwise an eigendecomposition with a relative
 * floor, so blocks with structural null spaces (projection equalities) get
 * pseudo-inverses and pseudo-log-determinants.
 */
struct BlockFactor {
  bool eigpath = false;
  Eigen::LLT<Mat> llt;
  Mat u;          ///< kept eigenvectors (eig path)
  Vec lam;        ///< kept eigenvalues
  double logdet = 0.0;
  double min_eig = 0.0;  ///< smallest eigenvalue before flooring (eig path)
  Mat inv;        ///< (pseudo-)inverse, formed on demand

  /// Returns false when the block has an eigenvalue below -tol_neg.
  bool factor(const Mat& a, bool force_eig, double tol_neg = 0.0) {
    if (!force_eig) {
      llt.compute(a);
      if (llt.info() == Eigen::Success) {
        eigpath = false;
        logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        min_eig = 1.0;
        return true;
      }
    }
    eigpath = true;
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    const Vec& ev = es.eigenvalues();
    min_eig = ev(0);
    double floor = 1e-14 * std::max(1.0, ev(ev.size() - 1));
    if (min_eig < -std::max(tol_neg, floor)) return false;
    int kept = 0;
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) > floor) ++kept;
    u.resize(a.rows(), kept);
    lam.resize(kept);
    logdet = 0.0;
    int k = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i) <= floor) continue;
      u.col(k) = es.eigenvectors().col(i);
      lam(k) = ev(i);
      logdet += std::log(ev(i));
      ++k;
    }
    return true;
  }

  void form_inverse() {
    if (!eigpath) {
      inv = llt.solve(Mat::Identity(llt.matrixL().rows(), llt.matrixL().rows()));
      inv = 0.5 * (inv + inv.transpose()).eval();
    } else {
      inv = u * lam.cwiseInverse().asDiagonal() * u.transpose();
    }
  }

  /// Eigenvalues of A^{-1/2} B A^{-1/2} (restricted to the kept subspace on
  /// the eig path); these drive exact log-det line searches.
  Vec gen_eigs(const Mat& b) const {
    Mat w;
    if (!eigpath) {
      auto l = llt.matrixL();
      Mat y = l.solve(b);
      w = l.solve(y.transpose());
    } else {
      Mat p = u * lam.cwiseSqrt().cwiseInverse().asDiagonal();
      w = p.transpose() * b * p;
    }
    w = 0.5 * (w + w.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(w, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
};

struct PcgResult {
  Mat x;
  int iters = 0;
  bool converged = false;
};

/// Preconditioned conjugate gradients over symmetric matrices with the
/// Frobenius inner product.
inline PcgResult pcg_mat(const std::function<Mat(const Mat&)>& apply,
                         const std::function<Mat(const Mat&)>& prec,
                         const Mat& rhs, double tol_rel, int maxit) {
  PcgResult res;
  res.x = Mat::Zero(rhs.rows(), rhs.cols());
  Mat r = rhs;
  double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    res.converged = true;
    return res;
  }
  Mat z = prec(r);
  Mat p = z;
  double rz = frob_inner(r, z);
  for (int it = 0; it < maxit; ++it) {
    Mat ap = apply(p);
    double pap = frob_inner(p, ap);
    if (pap <= 0.0) break;  // indefinite leak; keep the current iterate
    double alpha = rz / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    ++res.iters;
    if (r.norm() <= tol_rel * rhs_norm) {
      res.converged = true;
      break;
    }
    z = prec(r);
    double rz_new = frob_inner(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

/**
 * Solves the tangent-space overlap system (P S P) d = rhs with P the
 * projector onto the tangent of all equalities.  Trace-only problems use the
 * exact analytic inverse; extra equalities wrap it in conjugate gradients.
 */
struct TangentSolver {
  const SDPProblem* prob;
  OverlapInverse ovl;
  bool direct;
  mutable long matvecs = 0;

  explicit TangentSolver(const SDPProblem& p, double cg_tol = 1e-11,
                         int cg_maxit = 2000)
      : prob(&p),
        ovl(p.cs, p.sp, p.c0t),
        direct(p.equality_rank <= 1),
        cg_tol_(cg_tol),
        cg_maxit_(cg_maxit) {}

  Mat solve(const Mat& rhs) const {
    if (direct) {
      Mat d = ovl.solve(rhs);
      matvecs += ovl.last_iterations();
      return d;
    }
    auto apply = [&](const Mat& x) { return prob->project(ovl.forward(prob->project(x))); };
    std::function<Mat(const Mat&)> prec;
    if (ovl.analytic())
      prec = [&](const Mat& r) { return prob->project(ovl.solve(r)); };
    else
      prec = [](const Mat& r) { return r; };
    PcgResult res = pcg_mat(apply, prec, prob->project(rhs), cg_tol_, cg_maxit_);
    matvecs += res.iters;
    if (!res.converged)
      throw std::runtime_error("tangent overlap solve did not converge");
    return res.x;
  }

 private:
  double cg_tol_;
  int cg_maxit_;
};

/// a + s * b over all carrier components.
inline Carrier carrier_axpy(double s, const Carrier& b, Carrier a) {
  for (std::size_t k = 0; k < a.blocks.size(); ++k) a.blocks[k].second += s * b.blocks[k].second;
  if (a.ineq.size()) a.ineq += s * b.ineq;
  return a;
}

/**
 * Index partition of one carrier block into mutually non-interacting
 * components.  Conserved one-body labels of the model (the spin classes of a
 * Hubbard chain, the level classes of a pairing Hamiltonian) appear as exact
 * structural zeros in every matrix the iteration can form, so component-wise
 * eigendecompositions replace the full-block ones at identical results.
 */
struct BlockPartition {
  std::vector<std::vector<int>> groups;
  bool trivial = true;
};

/// Connected components of a symmetric support mask.
inline BlockPartition partition_from_mask(const Eigen::ArrayXXd& mask) {
  const int n = static_cast<int>(mask.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (mask(i, j) != 0.0) parent[find(i)] = find(j);
  std::vector<std::vector<int>> byroot(n);
  for (int i = 0; i < n; ++i) byroot[find(i)].push_back(i);
  BlockPartition part;
  for (auto& g : byroot)
    if (!g.empty()) part.groups.push_back(std::move(g));
  part.trivial = part.groups.size() <= 1;
  return part;
}

/**
 * Support closure of the data reachable by a solver run: seeds the pair-space
 * mask with the problem matrices, then alternates generic masked samples
 * through the condition maps, their adjoints, the embedded partial trace and
 * the tangent solve until no block gains support.  Generic magnitudes keep
 * accidental cancellations out of the detected pattern.
 */
inline std::vector<BlockPartition> detect_partitions(const SDPProblem& prob,
                                                     const TangentSolver& ts) {
  const int d2 = prob.h2.rows();
  std::mt19937 rng(99991);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  auto masked_random = [&](const Eigen::ArrayXXd& mask) {
    Mat g = Mat::Zero(mask.rows(), mask.cols());
    for (int j = 0; j < mask.cols(); ++j)
      for (int i = 0; i <= j; ++i)
        if (mask(i, j) != 0.0) g(i, j) = g(j, i) = (rng() & 1u ? 1.0 : -1.0) * mag(rng);
    return g;
  };
  auto grow = [](Eigen::ArrayXXd& mask, const Mat& a) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale <= 0.0) return false;
    const double thr = 1e-12 * scale;
    bool grew = false;
    for (int j = 0; j < a.cols(); ++j)
      for (int i = 0; i < a.rows(); ++i)
        if (std::abs(a(i, j)) > thr && mask(i, j) == 0.0) {
          mask(i, j) = 1.0;
          grew = true;
        }
    return grew;
  };

  Eigen::ArrayXXd m2 = Eigen::ArrayXXd::Zero(d2, d2);
  grow(m2, Mat::Identity(d2, d2));
  grow(m2, prob.h2);
  grow(m2, prob.gamma_center);
  for (const Mat& e : prob.etil) grow(m2, e);
  for (const Mat& c : prob.c0) grow(m2, c);
  if (prob.nonlin) {
    grow(m2, prob.nonlin->T);
    grow(m2, prob.nonlin->P);
  }

  Carrier shape = prob.apply_L(prob.gamma_center);
  std::vector<Eigen::ArrayXXd> cm;
  cm.reserve(shape.blocks.size());
  for (const auto& [c, b] : shape.blocks) {
    cm.emplace_back(Eigen::ArrayXXd::Zero(b.rows(), b.cols()));
    grow(cm.back(), b);
  }

  for (int round = 0; round < 12; ++round) {
    bool grew = false;
    Mat g = masked_random(m2);
    Carrier car = prob.apply_L(g);
    for (std::size_t k = 0; k < car.blocks.size(); ++k)
      grew |= grow(cm[k], car.blocks[k].second);
    Carrier back = shape;
    for (std::size_t k = 0; k < back.blocks.size(); ++k)
      back.blocks[k].second = masked_random(cm[k]);
    if (back.ineq.size()) back.ineq.setOnes();
    grew |= grow(m2, prob.collapse_L(back));
    grew |= grow(m2, pair_embed(partial_trace(g, prob.sp.pb), prob.sp.pb));
    try {
      grew |= grow(m2, ts.solve(prob.project(masked_random(m2))));
    } catch (const std::runtime_error&) {
      // Tangent solves on unstructured data may stall; the analytic closure
      // terms above already cover their support.
    }
    if (!grew) break;
  }

  std::vector<BlockPartition> parts;
  parts.reserve(cm.size());
  for (const auto& m : cm) parts.push_back(partition_from_mask(m));
  return parts;
}

/// Projection onto the positive eigenspace, component by component.
inline Mat positive_part(const Mat& w, const BlockPartition& part) {
  Vec ew;
  Mat ev;
  if (part.trivial) {
    sym_eig(w, ew, ev);
    Mat pos = ev * ew.cwiseMax(0.0).asDiagonal() * ev.transpose();
    return 0.5 * (pos + pos.transpose());
  }
  Mat pos = Mat::Zero(w.rows(), w.cols());
  for (const auto& g : part.groups) {
    if (g.size() == 1) {
      pos(g[0], g[0]) = std::max(w(g[0], g[0]), 0.0);
      continue;
    }
    Mat sub = w(g, g);
    sym_eig(sub, ew, ev);
    Mat p = ev * ew.cwiseMax(0.0).asDiagonal() * ev.transpose();
    pos(g, g) = 0.5 * (p + p.transpose());
  }
  return pos;
}

}  // namespace detail
}  // namespace v2dm
