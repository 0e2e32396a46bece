#include "v2dm/solvers.hpp"

#include "solver_common.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <memory>
#include <limits>
#include <random>
#include <stdexcept>

namespace v2dm {

using detail::frob_inner;

namespace {

/// Spectral data of one symmetric positive definite carrier block.
struct SpecBlock {
  Mat u;
  Vec lam;       ///< clamped strictly positive
  double logdet = 0.0;

  void compute(const Mat& a) {
    detail::sym_eig(a, lam, u);
    double fl = 1e-15 * std::max(1.0, lam(lam.size() - 1));
    lam = lam.cwiseMax(fl);
    logdet = lam.array().log().sum();
  }
  Mat power(double p) const {
    return u * lam.array().pow(p).matrix().asDiagonal() * u.transpose();
  }
};

double min_eig(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Orthonormal basis of the traceless symmetric pair matrices, used to
/// assemble the scaled normal system densely when that is affordable.
struct TracelessBasis {
  int d = 0;
  int nfree = 0;
  Mat helmert;  ///< (d-1) x d orthonormal rows, every row orthogonal to 1

  explicit TracelessBasis(int dim) : d(dim), nfree(dim * (dim + 1) / 2 - 1) {
    helmert = Mat::Zero(d - 1, d);
    for (int k = 1; k < d; ++k) {
      double s = 1.0 / std::sqrt(double(k) * (k + 1));
      for (int j = 0; j < k; ++j) helmert(k - 1, j) = s;
      helmert(k - 1, k) = -double(k) * s;
    }
  }
  Vec pack(const Mat& a) const {
    Vec v(nfree);
    int p = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) v(p++) = a(i, j) * std::sqrt(2.0);
    v.segment(p, d - 1) = helmert * a.diagonal();
    return v;
  }
  Mat unpack(const Vec& v) const {
    Mat a(d, d);
    int p = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) a(i, j) = a(j, i) = v(p++) / std::sqrt(2.0);
    a.diagonal() = helmert.transpose() * v.segment(p, d - 1);
    return a;
  }
};

}  // namespace

/**
 * Predictor-corrector interior-point method on the pair (X, Z): X solves the
 * certificate program min <u0, X> over the affine set <L(f), X> = <f, H2>,
 * Z = u0 + L(gamma_dual) stays dual-feasible, and both steps come from the
 * scaled central-path equation with the geometric-mean scaling point.
 */
SolverReport solve_pd_pc(const SDPProblem& prob, const SolverOptions& opt) {
  if (prob.nonlin)
    throw std::invalid_argument("predictor-corrector solver does not support the nonlinear hopping floor");

  const Mat& h2 = prob.h2;
  const int m_ineq = static_cast<int>(prob.c0.size());
  const int nblk = static_cast<int>(prob.cs.conds().size());
  const double e_center = frob_inner(prob.gamma_center, h2);
  const double n_dim = prob.barrier_dimension();

  detail::TangentSolver ts(prob);
  Carrier u0 = prob.apply_L(prob.gamma_center);

  long matvecs = 0;

  // Projection of a carrier onto the affine certificate set.
  auto affine_project = [&](Carrier a) {
    Mat r = prob.project(collapse(a, prob.sp, &prob.c0) - h2);
    Mat c = ts.solve(r);
    return detail::carrier_axpy(-1.0, prob.apply_L(c), a);
  };
  // Projection onto the homogeneous constraint null space.
  auto null_project = [&](const Carrier& a) {
    Mat r = prob.project(collapse(a, prob.sp, &prob.c0));
    Mat c = ts.solve(r);
    return detail::carrier_axpy(-1.0, prob.apply_L(c), a);
  };

  // A positive definite carrier with zero constraint overlaps: lifts any
  // projected start back into the cone without leaving the affine set.
  Carrier lift = null_project(u0);
  {
    bool ok = true;
    for (const auto& [c, b] : lift.blocks)
      if (min_eig(b) < 1e-8 * (1.0 + b.norm())) ok = false;
    for (int j = 0; j < m_ineq; ++j)
      if (lift.ineq(j) < 1e-8) ok = false;
    if (!ok) {
      // Compensate every non-identity block through the identity block,
      // which the projector cannot see once the trace part is removed.
      Carrier ones = Carrier::zero(prob.cs, prob.sp.dims, m_ineq);
      for (auto& [c, b] : ones.blocks)
        if (c != Cond::I) b.setIdentity();
      if (m_ineq) ones.ineq.setConstant(1.0);
      Mat a0 = prob.project(collapse(ones, prob.sp, &prob.c0));
      lift = ones;
      for (auto& [c, b] : lift.blocks)
        if (c == Cond::I)
          b = (1.0 + a0.norm()) * Mat::Identity(b.rows(), b.cols()) - a0;
    }
  }

  // Feasible interior start: project a seeded random carrier, then walk
  // along the lift direction until every block clears the margin.
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Carrier X = Carrier::zero(prob.cs, prob.sp.dims, m_ineq);
  for (auto& [c, b] : X.blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j <= i; ++j) b(i, j) = b(j, i) = unif(rng);
  }
  for (int j = 0; j < m_ineq; ++j) X.ineq(j) = unif(rng);
  X = affine_project(X);
  {
    const double margin = 1.0;
    double step = 0.0;
    for (int k = 0; k < nblk; ++k) {
      double lx = min_eig(X.blocks[k].second);
      double ll = min_eig(lift.blocks[k].second);
      if (lx < margin) step = std::max(step, (margin - lx) / ll);
    }
    for (int j = 0; j < m_ineq; ++j)
      if (X.ineq(j) < margin) step = std::max(step, (margin - X.ineq(j)) / lift.ineq(j));
    X = detail::carrier_axpy(step, lift, X);
  }

  Carrier Z = u0;
  Mat gamma_dual = Mat::Zero(h2.rows(), h2.cols());
  double eta = carrier_inner(X, Z);

  SolverReport rep;
  int stalls = 0;
  std::vector<SpecBlock> sx(nblk), sz(nblk);

  // Dense normal solves pay off while every carrier block stays small and the
  // traceless pair space is moderate; otherwise fall back to conjugate
  // gradients with the mean-eigenvalue overlap preconditioner.
  std::unique_ptr<TracelessBasis> basis;
  {
    int max_dim = 0;
    for (const auto& [c, b] : X.blocks) max_dim = std::max(max_dim, int(b.rows()));
    int d2 = h2.rows();
    if (max_dim <= 256 && d2 * (d2 + 1) / 2 - 1 <= 2600)
      basis = std::make_unique<TracelessBasis>(d2);
  }
  bool go_dense = false;

  for (int it = 1; it <= opt.max_iter; ++it) {
    rep.iterations = it;
    for (int k = 0; k < nblk; ++k) {
      sx[k].compute(X.blocks[k].second);
      sz[k].compute(Z.blocks[k].second);
    }
    double logdet_x = 0.0, logdet_z = 0.0;
    for (int k = 0; k < nblk; ++k) {
      logdet_x += sx[k].logdet;
      logdet_z += sz[k].logdet;
    }
    for (int j = 0; j < m_ineq; ++j) {
      logdet_x += std::log(X.ineq(j));
      logdet_z += std::log(Z.ineq(j));
    }
    double psi = n_dim * std::log(eta) - n_dim * std::log(n_dim) - logdet_x - logdet_z;

    if (opt.collect_trace) {
      TraceRow row;
      row.cols = {{"iter", double(it)},
                  {"eta", eta},
                  {"psi", psi},
                  {"primal_energy", e_center + frob_inner(gamma_dual, h2) - eta},
                  {"dual_energy", e_center + frob_inner(gamma_dual, h2)}};
      rep.trace.push_back(std::move(row));
    }
    if (eta <= opt.tol * n_dim) {
      rep.converged = true;
      rep.termination = "converged";
      break;
    }

    bool corrector = psi > 0.05;
    double nu = corrector ? 1.0 : 0.0;

    // Geometric-mean scaling point per block: D X D = Z.
    std::vector<Mat> D(nblk), Dinv(nblk);
    for (int k = 0; k < nblk; ++k) {
      Mat sxh = sx[k].power(0.5);
      Mat sxih = sx[k].power(-0.5);
      SpecBlock mid;
      mid.compute(sxh * Z.blocks[k].second * sxh);
      D[k] = sxih * mid.power(0.5) * sxih;
      Dinv[k] = sxh * mid.power(-0.5) * sxh;
      D[k] = 0.5 * (D[k] + D[k].transpose()).eval();
      Dinv[k] = 0.5 * (Dinv[k] + Dinv[k].transpose()).eval();
    }
    Vec dsq(m_ineq);  // scalar D_j^2 = z_j / x_j
    for (int j = 0; j < m_ineq; ++j) dsq(j) = Z.ineq(j) / X.ineq(j);

    // Dual direction: Delta_Z = L(dz) with the scaled equation projected
    // onto the dual-feasible subspace.
    Carrier bd = Carrier::zero(prob.cs, prob.sp.dims, m_ineq);
    for (int k = 0; k < nblk; ++k)
      bd.blocks[k].second = (nu * eta / n_dim) * sz[k].power(-1.0) - X.blocks[k].second;
    for (int j = 0; j < m_ineq; ++j)
      bd.ineq(j) = (nu * eta / n_dim) / Z.ineq(j) - X.ineq(j);
    Mat rhs_d = prob.project(collapse(bd, prob.sp, &prob.c0));

    auto op_dual = [&](const Mat& dm) {
      Carrier l = prob.apply_L(dm);
      for (int k = 0; k < nblk; ++k)
        l.blocks[k].second = (Dinv[k] * l.blocks[k].second * Dinv[k]).eval();
      for (int j = 0; j < m_ineq; ++j) l.ineq(j) /= dsq(j);
      return prob.project(collapse(l, prob.sp, &prob.c0));
    };
    // Preconditioner: overlap model with each block sandwich replaced by its
    // mean eigenvalue, exact for the analytic conditions.
    std::function<Mat(const Mat&)> prec_d = [](const Mat& r) { return r; };
    std::unique_ptr<ExtOverlapInverse> ext;
    {
      GQCoeffs co{0.0, 0.0, 0.0};
      bool any = false;
      std::vector<Mat> vecs;
      for (int k = 0; k < nblk; ++k) {
        Cond c = prob.cs.conds()[k];
        if (c == Cond::GutzRho || c == Cond::GutzQ) continue;
        double chi = Dinv[k].trace() / Dinv[k].rows();
        GQCoeffs one = coeffs_for(ConditionSet({c}), prob.sp.M(), prob.sp.N());
        if (c != Cond::I) {
          GQCoeffs id = coeffs_for(ConditionSet({Cond::I}), prob.sp.M(), prob.sp.N());
          one.a -= id.a;
          one.b -= id.b;
          one.c -= id.c;
        }
        double w = chi * chi;
        co.a += w * one.a;
        co.b += w * one.b;
        co.c += w * one.c;
        any = true;
      }
      for (int j = 0; j < m_ineq; ++j) vecs.push_back(prob.c0t[j] / std::sqrt(dsq(j)));
      if (any) {
        ext = std::make_unique<ExtOverlapInverse>(co, vecs, prob.sp.pb);
        prec_d = [&](const Mat& r) { return prob.project(ext->solve(r)); };
      }
    }
    // Solve the dual system by preconditioned conjugate gradients while that
    // stays cheap; once the approach to complementarity degrades the
    // conditioning past the iteration budget, assemble the scaled normal
    // matrix on the traceless basis and factor it exactly from then on.
    Mat dz;
    bool solved = false;
    if (!basis || !go_dense) {
      detail::PcgResult dual =
          detail::pcg_mat(op_dual, prec_d, rhs_d, 1e-11, basis ? 300 : 2000);
      matvecs += dual.iters;
      if (dual.converged || !basis) {
        dz = dual.x;
        solved = true;
      } else {
        go_dense = true;
      }
    }
    if (!solved) {
      Mat schur(basis->nfree, basis->nfree);
      for (int j = 0; j < basis->nfree; ++j)
        schur.col(j) = basis->pack(op_dual(basis->unpack(Vec::Unit(basis->nfree, j))));
      matvecs += basis->nfree;
      schur = 0.5 * (schur + schur.transpose()).eval();
      Eigen::LDLT<Mat> ldlt(schur);
      if (ldlt.info() == Eigen::Success) {
        dz = basis->unpack(ldlt.solve(basis->pack(rhs_d)));
      } else {
        detail::PcgResult dual = detail::pcg_mat(op_dual, prec_d, rhs_d, 1e-11, 2000);
        matvecs += dual.iters;
        dz = dual.x;
      }
    }
    Carrier dZ = prob.apply_L(dz);

    // Primal direction: the scaled equation gives Delta_X explicitly once
    // Delta_Z is known, and the constraint-null projection keeps the affine
    // feasibility exact even under an inexact dual solve.
    Carrier dX = bd;
    for (int k = 0; k < nblk; ++k)
      dX.blocks[k].second -= (Dinv[k] * dZ.blocks[k].second * Dinv[k]).eval();
    for (int j = 0; j < m_ineq; ++j) dX.ineq(j) -= dZ.ineq(j) / dsq(j);
    dX = null_project(dX);

    // Step length from the exact merit function.
    double c_x = carrier_inner(Z, dX) / eta;
    double c_z = carrier_inner(X, dZ) / eta;
    std::vector<Vec> lam_sets;
    for (int k = 0; k < nblk; ++k) {
      Mat sxih = sx[k].power(-0.5);
      Mat w = sxih * dX.blocks[k].second * sxih;
      w = 0.5 * (w + w.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Mat> es(w, Eigen::EigenvaluesOnly);
      lam_sets.push_back(es.eigenvalues());
      Mat szih = sz[k].power(-0.5);
      Mat v = szih * dZ.blocks[k].second * szih;
      v = 0.5 * (v + v.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Mat> fs(v, Eigen::EigenvaluesOnly);
      lam_sets.push_back(fs.eigenvalues());
    }
    Vec lam_ineq(2 * m_ineq);
    for (int j = 0; j < m_ineq; ++j) {
      lam_ineq(2 * j) = dX.ineq(j) / X.ineq(j);
      lam_ineq(2 * j + 1) = dZ.ineq(j) / Z.ineq(j);
    }

    double alpha_dom = 1e3;
    for (const Vec& ls : lam_sets)
      for (int i = 0; i < ls.size(); ++i)
        if (ls(i) < 0.0) alpha_dom = std::min(alpha_dom, -1.0 / ls(i));
    for (int i = 0; i < lam_ineq.size(); ++i)
      if (lam_ineq(i) < 0.0) alpha_dom = std::min(alpha_dom, -1.0 / lam_ineq(i));
    if (c_x + c_z < 0.0) alpha_dom = std::min(alpha_dom, -1.0 / (c_x + c_z));
    alpha_dom *= 0.9999;

    auto theta = [&](double a) {
      double v = psi + n_dim * std::log1p(a * (c_x + c_z));
      for (const Vec& ls : lam_sets)
        for (int i = 0; i < ls.size(); ++i) v -= std::log1p(a * ls(i));
      for (int i = 0; i < lam_ineq.size(); ++i) v -= std::log1p(a * lam_ineq(i));
      return v;
    };

    double alpha;
    if (corrector) {
      alpha = std::min(1.0, alpha_dom);
      while (alpha > 1e-14 && theta(alpha) >= psi) alpha *= 0.5;
    } else {
      const double psi_max = 0.5;
      if (theta(alpha_dom) <= psi_max) {
        alpha = alpha_dom;
      } else {
        double lo = 0.0, hi = alpha_dom;
        for (int b = 0; b < 80; ++b) {
          double mid = 0.5 * (lo + hi);
          (theta(mid) <= psi_max ? lo : hi) = mid;
        }
        alpha = lo;
      }
    }
    if (alpha <= 1e-13) {
      if (++stalls >= 5) {
        rep.termination = "stalled";
        break;
      }
    } else {
      stalls = 0;
    }

    X = detail::carrier_axpy(alpha, dX, X);
    Z = detail::carrier_axpy(alpha, dZ, Z);
    for (auto& [c, b] : X.blocks) b = 0.5 * (b + b.transpose()).eval();
    for (auto& [c, b] : Z.blocks) b = 0.5 * (b + b.transpose()).eval();
    gamma_dual += alpha * dz;
    eta = carrier_inner(X, Z);
  }
  if (rep.termination.empty()) rep.termination = "iteration-limit";

  rep.gamma = prob.gamma_center + gamma_dual;
  rep.energy = e_center + frob_inner(gamma_dual, h2);
  rep.gap = eta;
  rep.primal_bound = rep.energy - eta;
  rep.primal_infeas = prob.project(collapse(X, prob.sp, &prob.c0) - h2).norm();
  rep.dual_infeas =
      carrier_norm(detail::carrier_axpy(-1.0, detail::carrier_axpy(1.0, prob.apply_L(gamma_dual), u0), Z));
  rep.newton_steps = rep.iterations;
  rep.matvecs = matvecs + ts.matvecs;
  return rep;
}

}  // namespace v2dm
