#include "v2dm/overlap.hpp"

#include "v2dm/maps.hpp"

#include <cmath>
#include <stdexcept>

namespace v2dm {

namespace {

/// Trace relations of the embedding: kappa, mu, lambda describe how a gq map
/// acts on the partial trace and the full trace.
struct GQTraces {
  double kappa, mu, lambda;
};

GQTraces gq_traces(const GQCoeffs& co, int M) {
  return {co.a - co.c * (M - 2), co.b * (M - 1) - co.c,
          co.a + co.b * M * (M - 1) - 2.0 * co.c * (M - 1)};
}

}  // namespace

Mat gq_apply(const GQCoeffs& co, const Mat& g2, const PairBasis& pb) {
  Mat out = co.a * g2;
  if (co.b != 0.0) {
    const double dd = 2.0 * tb_trace(g2);
    out += co.b * dd * Mat::Identity(g2.rows(), g2.cols());
  }
  if (co.c != 0.0) out -= co.c * pair_embed(partial_trace(g2, pb), pb);
  return out;
}

GQCoeffs coeffs_for(const ConditionSet& cs, int M, int N) {
  if (cs.has_gutzwiller())
    throw std::invalid_argument("coeffs_for: no closed form with Gutzwiller conditions");
  const double n = N, m = M;
  const double n1 = (n - 1.0) * (n - 1.0);
  GQCoeffs total{0.0, 0.0, 0.0};
  for (Cond c : cs.conds()) {
    GQCoeffs t;
    switch (c) {
      case Cond::I:
        t = {1.0, 0.0, 0.0};
        break;
      case Cond::Q:
        t = {1.0,
             (4.0 * n * n + 2.0 * n - 4.0 * n * m + m * m - m) / (n * n * n1),
             (2.0 * n - m) / n1};
        break;
      case Cond::G:
        t = {4.0, 0.0, (2.0 * n - m - 2.0) / n1};
        break;
      case Cond::T1:
        t = {m - 4.0,
             (m * m * m - 6.0 * m * m * n - 3.0 * m * m + 12.0 * m * n * n +
              12.0 * m * n + 2.0 * m - 18.0 * n * n - 6.0 * n * n * n) /
                 (3.0 * n * n * n1),
             -(m * m + 2.0 * n * n - 4.0 * m * n - m + 8.0 * n - 4.0) / (2.0 * n1)};
        break;
      case Cond::T2:
        t = {5.0 * m - 8.0, 2.0 / (n - 1.0),
             (2.0 * n * n + (m - 2.0) * (4.0 * n - 3.0) - m * m) / (2.0 * n1)};
        break;
      case Cond::T2P:
        t = {5.0 * m - 4.0, 2.0 / (n - 1.0),
             (2.0 * n * n + (m - 2.0) * (4.0 * n - 3.0) - m * m - 2.0) / (2.0 * n1)};
        break;
      default:
        throw std::logic_error("coeffs_for: unreachable");
    }
    total += t;
  }
  return total;
}

GQCoeffs gq_invert(const GQCoeffs& co, int M) {
  const auto [kappa, mu, lambda] = gq_traces(co, M);
  if (co.a == 0.0 || kappa == 0.0 || lambda == 0.0)
    throw std::invalid_argument("gq_invert: singular map");
  GQCoeffs inv;
  inv.a = 1.0 / co.a;
  inv.c = -co.c / (co.a * kappa);
  inv.b = -(co.a * co.b + co.b * co.c * M - 2.0 * co.c * co.c) / (co.a * kappa * lambda);
  return inv;
}

ExtOverlapInverse::ExtOverlapInverse(const GQCoeffs& co, std::vector<Mat> c0,
                                     const PairBasis& pb)
    : co_(co), c0_(std::move(c0)), pb_(&pb) {
  const int M = pb.orbitals();
  const auto [kappa, mu, lambda] = gq_traces(co, M);
  kappa_ = kappa;
  mu_ = mu;
  lambda_ = lambda;
  if (co_.a == 0.0 || kappa_ == 0.0 || lambda_ == 0.0)
    throw std::invalid_argument("ExtOverlapInverse: singular analytic part");
  const int m = static_cast<int>(c0_.size());
  c0bar_.reserve(m);
  c0ddbar_ = Vec::Zero(m);
  for (int j = 0; j < m; ++j) {
    c0bar_.push_back(partial_trace(c0_[j], pb));
    c0ddbar_[j] = 2.0 * tb_trace(c0_[j]);
  }
  // Contracted unknowns u = [full trace; overlaps beta_j; trace overlaps t_j].
  const int dim = 1 + 2 * m;
  sys_ = Mat::Zero(dim, dim);
  sys_(0, 0) = lambda_;
  for (int j = 0; j < m; ++j) sys_(0, 1 + j) = c0ddbar_[j];
  for (int i = 0; i < m; ++i) {
    sys_(1 + i, 0) = 0.5 * co_.b * c0ddbar_[i];
    for (int j = 0; j < m; ++j)
      sys_(1 + i, 1 + j) = (i == j ? co_.a : 0.0) + tb_inner(c0_[j], c0_[i]);
    sys_(1 + i, 1 + m + i) = -co_.c;
    sys_(1 + m + i, 0) = mu_ * c0ddbar_[i];
    for (int j = 0; j < m; ++j)
      sys_(1 + m + i, 1 + j) = c0bar_[j].cwiseProduct(c0bar_[i]).sum();
    sys_(1 + m + i, 1 + m + i) += kappa_;
  }
  lu_.compute(sys_);
}

Mat ExtOverlapInverse::solve(const Mat& q) const {
  const int m = static_cast<int>(c0_.size());
  const Mat qbar = partial_trace(q, *pb_);
  Vec rhs(1 + 2 * m);
  rhs[0] = 2.0 * tb_trace(q);
  for (int i = 0; i < m; ++i) {
    rhs[1 + i] = tb_inner(q, c0_[i]);
    rhs[1 + m + i] = qbar.cwiseProduct(c0bar_[i]).sum();
  }
  const Vec u = lu_.solve(rhs);
  const double gdd = u[0];
  // Reconstruct the partial trace, then the full matrix.
  Mat gbar = qbar - mu_ * gdd * Mat::Identity(qbar.rows(), qbar.cols());
  for (int j = 0; j < m; ++j) gbar -= u[1 + j] * c0bar_[j];
  gbar /= kappa_;
  Mat g = q - co_.b * gdd * Mat::Identity(q.rows(), q.cols()) +
          co_.c * pair_embed(gbar, *pb_);
  for (int j = 0; j < m; ++j) g -= u[1 + j] * c0_[j];
  return g / co_.a;
}

Mat ExtOverlapInverse::forward(const Mat& g2) const {
  Mat out = gq_apply(co_, g2, *pb_);
  for (const Mat& c : c0_) out += tb_inner(g2, c) * c;
  return out;
}

OverlapInverse::OverlapInverse(const ConditionSet& cs, const Spaces& sp,
                               std::vector<Mat> c0, double cg_tol, int cg_maxit)
    : sp_(&sp), cs_(cs), c0_(std::move(c0)), cg_tol_(cg_tol), cg_maxit_(cg_maxit) {
  analytic_ = !cs.has_gutzwiller();
  std::vector<Cond> closed;
  for (Cond c : cs.conds())
    if (c != Cond::GutzRho && c != Cond::GutzQ) closed.push_back(c);
  co_ = coeffs_for(ConditionSet(closed), sp.M(), sp.N());
  ext_ = std::make_unique<ExtOverlapInverse>(co_, c0_, sp.pb);
}

Mat OverlapInverse::forward(const Mat& g2) const {
  Mat out = Mat::Zero(g2.rows(), g2.cols());
  for (Cond c : cs_.conds()) out += adj_cond(c, apply_cond(c, g2, *sp_), *sp_);
  for (const Mat& c : c0_) out += tb_inner(g2, c) * c;
  return out;
}

Mat OverlapInverse::solve(const Mat& q) const {
  if (analytic_) {
    last_iters_ = 0;
    return ext_->solve(q);
  }
  // Preconditioned conjugate gradients on the trace-projected overlap.
  const int M = sp_->M();
  const Mat rhs = project_traceless(q, M);
  auto apply_A = [&](const Mat& x) { return project_traceless(forward(x), M); };
  auto apply_P = [&](const Mat& r) { return project_traceless(ext_->solve(r), M); };
  Mat x = Mat::Zero(q.rows(), q.cols());
  Mat r = rhs;
  Mat z = apply_P(r);
  Mat p = z;
  double rz = tb_inner(r, z);
  const double rhs_norm = std::sqrt(tb_inner(rhs, rhs));
  last_iters_ = 0;
  for (int it = 0; it < cg_maxit_; ++it) {
    if (std::sqrt(tb_inner(r, r)) <= cg_tol_ * std::max(rhs_norm, 1e-300)) break;
    const Mat Ap = apply_A(p);
    const double alpha = rz / tb_inner(p, Ap);
    x += alpha * p;
    r -= alpha * Ap;
    z = apply_P(r);
    const double rz_new = tb_inner(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    ++last_iters_;
  }
  return x;
}

}  // namespace v2dm
