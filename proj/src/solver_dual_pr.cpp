#include "v2dm/solvers.hpp"

#include "solver_common.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace v2dm {

using detail::frob_inner;

namespace {

/// Per-condition overlap coefficients (the set constructor always carries I,
/// so single-condition triples are recovered by subtracting the I triple).
GQCoeffs single_cond_coeffs(Cond c, int M, int N) {
  GQCoeffs co = coeffs_for(ConditionSet({c}), M, N);
  if (c != Cond::I) {
    GQCoeffs id = coeffs_for(ConditionSet({Cond::I}), M, N);
    co.a -= id.a;
    co.b -= id.b;
    co.c -= id.c;
  }
  return co;
}

}  // namespace

/**
 * Dual-only path following.  The iterate Gamma moves on the affine slice of
 * fixed trace (and optional equalities); log-det barriers on the condition
 * blocks, log barriers on inequality overlaps and on the kinetic floor gap
 * keep it strictly feasible.  Newton systems are solved by preconditioned
 * conjugate gradients in pair space; exact one-dimensional minimization uses
 * generalized eigenvalues of the step against the current blocks.
 */
SolverReport solve_dual_pr(const SDPProblem& prob, const SolverOptions& opt) {
  const Mat& h2 = prob.h2;
  const Spaces& sp = prob.sp;
  const int nblk = static_cast<int>(prob.cs.conds().size());
  const int m_ineq = static_cast<int>(prob.c0.size());
  const bool nl = prob.nonlin.has_value();
  const bool force_eig = prob.equality_rank > 1;
  const double n_dim = prob.barrier_dimension();

  SolverReport rep;
  Mat gamma = prob.gamma_center;

  std::vector<detail::BlockFactor> fac(nblk);

  // Everything the barrier sees at the current iterate.
  Carrier lg = prob.apply_L(gamma);
  double u_nl = 0.0, p_nl = 0.0, g_nl = 0.0, h_nl = 0.0;
  auto refresh_nl = [&]() {
    if (!nl) return true;
    const NonlinHopping& f = *prob.nonlin;
    p_nl = frob_inner(gamma, f.P);
    u_nl = frob_inner(gamma, f.T) - nonlin_f_star(f, p_nl);
    g_nl = nonlin_g(f, p_nl);
    h_nl = nonlin_h(f, p_nl);
    return u_nl > 0.0;
  };
  auto refresh_blocks = [&]() {
    lg = prob.apply_L(gamma);
    for (int k = 0; k < nblk; ++k)
      if (!fac[k].factor(lg.blocks[k].second, force_eig, 1e-12)) return false;
    for (int j = 0; j < m_ineq; ++j)
      if (lg.ineq(j) <= 0.0) return false;
    return true;
  };

  if (!refresh_blocks() || !refresh_nl()) {
    rep.termination = "infeasible-center";
    rep.converged = false;
    rep.gamma = gamma;
    rep.energy = frob_inner(gamma, h2);
    return rep;
  }

  long matvecs = 0;
  int newton_total = 0;
  double t = opt.t_init;
  bool last_leg = t <= opt.tol;

  for (;;) {
    ++rep.iterations;
    for (int inner = 0; inner < 100; ++inner) {
      for (int k = 0; k < nblk; ++k) fac[k].form_inverse();

      // Gradient of the barrier objective.
      Carrier ginv = Carrier::zero(prob.cs, sp.dims, m_ineq);
      for (int k = 0; k < nblk; ++k) ginv.blocks[k].second = fac[k].inv;
      for (int j = 0; j < m_ineq; ++j) ginv.ineq(j) = 1.0 / lg.ineq(j);
      Mat grad = h2 - t * collapse(ginv, sp, &prob.c0);
      if (nl) grad -= (t / u_nl) * (prob.nonlin->T - g_nl * prob.nonlin->P);
      grad = prob.project(grad);
      if (grad.norm() <= 1e-13 * (1.0 + h2.norm())) break;

      auto hess = [&](const Mat& d) {
        Carrier ld = prob.apply_L(d);
        for (int k = 0; k < nblk; ++k)
          ld.blocks[k].second = (fac[k].inv * ld.blocks[k].second * fac[k].inv).eval();
        for (int j = 0; j < m_ineq; ++j) ld.ineq(j) /= lg.ineq(j) * lg.ineq(j);
        Mat out = collapse(ld, sp, &prob.c0);
        if (nl) {
          const NonlinHopping& f = *prob.nonlin;
          double dt = frob_inner(d, f.T);
          double dp = frob_inner(d, f.P);
          out += ((dt - g_nl * dp) / (u_nl * u_nl)) * (f.T - g_nl * f.P);
          out += (h_nl * dp / u_nl) * f.P;
        }
        return Mat(t * prob.project(out));
      };

      // Preconditioner: weighted overlap model plus the exact rank-one
      // barrier terms, inverted through the extended machinery.
      GQCoeffs co{0.0, 0.0, 0.0};
      std::vector<Mat> vecs;
      for (int k = 0; k < nblk; ++k) {
        Cond c = prob.cs.conds()[k];
        if (c == Cond::GutzRho || c == Cond::GutzQ) continue;
        const Mat& blk = lg.blocks[k].second;
        double chi = blk.trace() / blk.rows();
        if (chi <= 0.0) chi = 1.0;
        GQCoeffs one = single_cond_coeffs(c, sp.M(), sp.N());
        double w = t / (chi * chi);
        co.a += w * one.a;
        co.b += w * one.b;
        co.c += w * one.c;
      }
      if (co.a <= 0.0) co.a = t;
      double sqt = std::sqrt(t);
      for (int j = 0; j < m_ineq; ++j) vecs.push_back(sqt * prob.c0t[j] / lg.ineq(j));
      if (nl) {
        const NonlinHopping& f = *prob.nonlin;
        vecs.push_back((sqt / u_nl) * project_traceless(f.T - g_nl * f.P, sp.M()));
        if (h_nl > 0.0)
          vecs.push_back(std::sqrt(t * h_nl / u_nl) * project_traceless(f.P, sp.M()));
      }
      ExtOverlapInverse ext(co, vecs, sp.pb);
      auto prec = [&](const Mat& r) { return prob.project(ext.solve(r)); };

      double cg_tol = std::max(1e-12, std::min(1e-2, 0.1 * t));
      detail::PcgResult cg = detail::pcg_mat(hess, prec, Mat(-grad), cg_tol, 400);
      matvecs += cg.iters;
      Mat delta = cg.x;
      double slope0 = frob_inner(grad, delta);
      if (slope0 >= 0.0) {  // conjugate gradients failed to descend
        delta = -grad;
        slope0 = -grad.squaredNorm();
        if (slope0 == 0.0) break;
      }

      // Exact line search on the barrier derivative.
      Carrier ldl = prob.apply_L(delta);
      std::vector<double> lams;
      for (int k = 0; k < nblk; ++k) {
        Vec le = fac[k].gen_eigs(ldl.blocks[k].second);
        lams.insert(lams.end(), le.data(), le.data() + le.size());
      }
      for (int j = 0; j < m_ineq; ++j) lams.push_back(ldl.ineq(j) / lg.ineq(j));

      double alpha_hi = 1e6;
      for (double l : lams)
        if (l < 0.0) alpha_hi = std::min(alpha_hi, -0.99 / l);

      double d_t = 0.0, d_p = 0.0, gamma_t = 0.0;
      std::function<double(double)> u_of, du_of;
      if (nl) {
        const NonlinHopping& f = *prob.nonlin;
        d_t = frob_inner(delta, f.T);
        d_p = frob_inner(delta, f.P);
        gamma_t = frob_inner(gamma, f.T);
        u_of = [&, d_t, d_p, gamma_t](double a) {
          return gamma_t + a * d_t - nonlin_f_star(*prob.nonlin, p_nl + a * d_p);
        };
        du_of = [&, d_t, d_p](double a) {
          return d_t - nonlin_g(*prob.nonlin, p_nl + a * d_p) * d_p;
        };
        if (d_p != 0.0) {  // stop at the branch point, barely inside the far side
          double a_br = (prob.nonlin->p_branch - p_nl) / d_p;
          if (a_br > 0.0 && a_br < alpha_hi) alpha_hi = a_br * (1.0 + 1e-12);
        }
        if (u_of(alpha_hi) <= 0.0) {
          double lo = 0.0, hi = alpha_hi;
          for (int b = 0; b < 200; ++b) {
            double mid = 0.5 * (lo + hi);
            (u_of(mid) > 0.0 ? lo : hi) = mid;
          }
          alpha_hi = 0.999 * lo;
        }
      }

      auto dphi = [&](double a) {
        double v = frob_inner(delta, h2);
        for (double l : lams) v -= t * l / (1.0 + a * l);
        if (nl) v -= t * du_of(a) / u_of(a);
        return v;
      };

      double alpha = alpha_hi;
      if (dphi(alpha_hi) >= 0.0) {
        double lo = 0.0, hi = alpha_hi;
        for (int b = 0; b < 200 && (hi - lo) > 1e-12 * alpha_hi; ++b) {
          double mid = 0.5 * (lo + hi);
          (dphi(mid) < 0.0 ? lo : hi) = mid;
        }
        alpha = 0.5 * (lo + hi);
      }

      gamma += alpha * delta;
      ++newton_total;
      if (!refresh_blocks() || !refresh_nl())
        throw std::runtime_error("dual path following left the feasible region");

      if (opt.collect_trace) {
        TraceRow row;
        row.cols = {{"t", t},
                    {"newton_step", double(newton_total)},
                    {"cg_iters", double(cg.iters)},
                    {"gap_estimate", n_dim * t},
                    {"energy", frob_inner(gamma, h2)}};
        rep.trace.push_back(std::move(row));
      }
      if (alpha * delta.norm() <= opt.newton_tol) break;
    }

    gamma = prob.gamma_center + prob.project(gamma - prob.gamma_center);
    if (!refresh_blocks() || !refresh_nl())
      throw std::runtime_error("dual path following left the feasible region");

    if (last_leg || t <= opt.tol) break;
    t *= opt.t_shrink;
    if (t <= opt.tol) {
      t = opt.tol;
      last_leg = true;
    }
  }

  rep.gamma = gamma;
  rep.energy = frob_inner(gamma, h2);
  rep.gap = n_dim * t;
  rep.primal_bound = rep.energy - rep.gap;
  rep.newton_steps = newton_total;
  rep.matvecs = matvecs;
  rep.converged = true;
  rep.termination = "converged";
  return rep;
}

}  // namespace v2dm
