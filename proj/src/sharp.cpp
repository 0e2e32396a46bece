#include "v2dm/sharp.hpp"

#include "v2dm/maps.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace v2dm {

namespace {

double frob_inner(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

/// Ordered-slot vector of a skew matrix: v[slot(a<b)] = B_ab.
Vec skew_to_vec(const Mat& B, const PairBasis& pb) {
  Vec v(pb.size());
  for (int p = 0; p < pb.size(); ++p) {
    auto [a, b] = pb.pair(p);
    v(p) = B(a, b);
  }
  return v;
}

}  // namespace

CanonicalPairs canonical_pairing_form(const Mat& B) {
  const int M = static_cast<int>(B.rows());
  if (B.rows() != B.cols() || M % 2 != 0)
    throw std::invalid_argument("canonical_pairing_form: need an even-dimensional square matrix");
  if ((B + B.transpose()).norm() > 1e-10 * (1.0 + B.norm()))
    throw std::invalid_argument("canonical_pairing_form: matrix is not skew");

  // B^T B = -B^2 has doubly degenerate spectrum s_k^2; each positive plane
  // is spanned by an eigenvector v and its rotated partner -Bv/s.
  Mat A = B.transpose() * B;
  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(A);

  CanonicalPairs cp;
  cp.U = Mat::Zero(M, M);
  cp.x = Vec::Zero(M / 2);
  std::vector<Vec> rows;
  rows.reserve(M);
  auto deflate = [&](Vec v) {
    for (const Vec& r : rows) v -= r.dot(v) * r;
    return v;
  };

  double smax = std::sqrt(std::max(es.eigenvalues()(M - 1), 0.0));
  int k = 0;
  for (int idx = M - 1; idx >= 0 && k < M / 2; --idx) {
    double s2 = es.eigenvalues()(idx);
    if (s2 <= 0.0) break;
    double s = std::sqrt(s2);
    if (s <= 1e-12 * std::max(1.0, smax)) break;
    Vec v = deflate(es.eigenvectors().col(idx));
    if (v.norm() < 1e-8) continue;  // plane already consumed by a degenerate partner
    v.normalize();
    Vec w = deflate(Vec(-B * v / s));
    w.normalize();
    rows.push_back(v);
    rows.push_back(w);
    cp.U.row(2 * k) = v.transpose();
    cp.U.row(2 * k + 1) = w.transpose();
    cp.x(k) = std::sqrt(2.0) * s;
    ++k;
  }
  // Null space: complete to an orthonormal basis, amplitudes zero.
  int slot = 2 * k;
  for (int c = 0; c < M && slot < M; ++c) {
    Vec v = deflate(Vec(Mat::Identity(M, M).col(c)));
    if (v.norm() < 1e-8) continue;
    v.normalize();
    rows.push_back(v);
    cp.U.row(slot++) = v.transpose();
  }
  return cp;
}

namespace {

/// Residual of the rapidity equations; x2 holds per-level squared
/// amplitudes, each level counted twice in the orbital sums.
void richardson_residual(const Vec& x2, const Vec& y, Vec& V) {
  const int m = static_cast<int>(y.size());
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int a = 0; a < x2.size(); ++a) s += 2.0 * x2(a) / (1.0 - y(i) * x2(a));
    s += 4.0 / y(i);
    for (int j = 0; j < m; ++j)
      if (j != i) s += 4.0 / (y(i) - y(j));
    V(i) = s;
  }
}

void richardson_jacobian(const Vec& x2, const Vec& y, Mat& J) {
  const int m = static_cast<int>(y.size());
  for (int i = 0; i < m; ++i) {
    double d = 0.0;
    for (int a = 0; a < x2.size(); ++a) {
      double r = 1.0 - y(i) * x2(a);
      d += 2.0 * x2(a) * x2(a) / (r * r);
    }
    d -= 4.0 / (y(i) * y(i));
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      double dy = y(i) - y(j);
      d -= 4.0 / (dy * dy);
      J(i, j) = 4.0 / (dy * dy);
    }
    J(i, i) = d;
  }
}

/// Solves the rapidity equations for n pairs on the given levels; returns
/// true on convergence.
bool solve_rapidities(const Vec& x2, int n, Vec& y) {
  const int m = n - 1;
  y.resize(m);
  if (m <= 0) return true;
  Vec V(m), step(m);
  Mat J(m, m);
  for (int attempt = 0; attempt < 8; ++attempt) {
    for (int i = 0; i < m; ++i)
      y(i) = -(i + 1) * 0.1 * (1.0 + 0.5 * attempt) - 0.013 * attempt * (i + 1);
    richardson_residual(x2, y, V);
    double res = V.norm();
    bool ok = false;
    for (int it = 0; it < 500; ++it) {
      if (res <= 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff())) {
        ok = true;
        break;
      }
      richardson_jacobian(x2, y, J);
      Eigen::PartialPivLU<Mat> lu(J);
      step = lu.solve(V);
      if (!step.allFinite()) break;
      double damp = 1.0;
      Vec ynew = y - step;
      Vec Vnew(m);
      for (int h = 0; h < 60; ++h) {
        bool valid = ynew.allFinite();
        for (int i = 0; i < m && valid; ++i) {
          if (ynew(i) >= 0.0) valid = false;  // maximal-root rapidities stay negative
          for (int j = 0; j < i; ++j)
            if (ynew(i) == ynew(j)) valid = false;
        }
        if (valid) {
          richardson_residual(x2, ynew, Vnew);
          if (Vnew.norm() < res) break;
        }
        damp *= 0.5;
        ynew = y - damp * step;
        if (h == 59) valid = false;
      }
      if (!ynew.allFinite()) break;
      richardson_residual(x2, ynew, Vnew);
      if (Vnew.norm() >= res && damp <= 1e-17) break;
      y = ynew;
      V = Vnew;
      res = V.norm();
    }
    if (ok || res <= 1e-9) return true;
  }
  return false;
}

/// Largest pair eigenvalue for n pairs over the given levels.
double lambda_pairs(const Vec& x_levels, int n) {
  if (n <= 0) return 0.0;
  if (n > x_levels.size()) return 0.0;
  Vec x2 = x_levels.cwiseAbs2();
  double base = 2.0 * x2.sum();  // orbital sum of squared amplitudes
  if (n == 1) return base;
  Vec y;
  if (!solve_rapidities(x2, n, y))
    throw std::runtime_error("rapidity equations did not converge");
  double corr = 0.0;
  for (int i = 0; i < y.size(); ++i) corr += 1.0 / y(i);
  return base - 4.0 * corr;
}

Vec drop_level(const Vec& x, int kappa) {
  Vec out(x.size() - 1);
  int j = 0;
  for (int i = 0; i < x.size(); ++i)
    if (i != kappa) out(j++) = x(i);
  return out;
}

}  // namespace

Vec richardson_rapidities(const Vec& x, int n, const std::vector<int>& blocked) {
  Vec xs = x;
  for (auto it = blocked.rbegin(); it != blocked.rend(); ++it) xs = drop_level(xs, *it);
  Vec y;
  if (n >= 2 && !solve_rapidities(xs.cwiseAbs2(), n, y))
    throw std::runtime_error("rapidity equations did not converge");
  return y;
}

double richardson_lambda_max(const Vec& x, int N) {
  if (N < 2) return 0.0;
  if (N % 2 == 0) {
    return lambda_pairs(x, N / 2);
  }
  // Seniority one: the unpaired particle blocks one level; best choice wins.
  int n = (N - 1) / 2;
  double best = 0.0;
  for (int kappa = 0; kappa < x.size(); ++kappa)
    best = std::max(best, lambda_pairs(drop_level(x, kappa), n));
  return best;
}

Vec dlambda_dx(const Vec& x, int N) {
  const int levels = static_cast<int>(x.size());
  Vec grad = Vec::Zero(levels);
  if (N < 2) return grad;

  auto grad_even = [&](const Vec& xs, int n) {
    Vec g = Vec::Zero(xs.size());
    if (n <= 0 || n > xs.size()) return g;
    Vec x2 = xs.cwiseAbs2();
    if (n == 1) return Vec(4.0 * xs);
    Vec y;
    if (!solve_rapidities(x2, n, y))
      throw std::runtime_error("rapidity equations did not converge");
    const int m = n - 1;
    Mat J(m, m);
    richardson_jacobian(x2, y, J);
    Eigen::PartialPivLU<Mat> lu(J);
    for (int mu = 0; mu < xs.size(); ++mu) {
      Vec dV(m);
      for (int i = 0; i < m; ++i) {
        double r = 1.0 - y(i) * x2(mu);
        dV(i) = 4.0 * xs(mu) / (r * r);
      }
      Vec dy = lu.solve(Vec(-dV));
      double s = 4.0 * xs(mu);
      for (int i = 0; i < m; ++i) s += 4.0 * dy(i) / (y(i) * y(i));
      g(mu) = s;
    }
    return g;
  };

  if (N % 2 == 0) return grad_even(x, N / 2);

  int n = (N - 1) / 2;
  double best = -1.0;
  int best_kappa = 0;
  for (int kappa = 0; kappa < levels; ++kappa) {
    double v = lambda_pairs(drop_level(x, kappa), n);
    if (v > best) {
      best = v;
      best_kappa = kappa;
    }
  }
  Vec sub = grad_even(drop_level(x, best_kappa), n);
  int j = 0;
  for (int i = 0; i < levels; ++i)
    if (i != best_kappa) grad(i) = sub(j++);
  return grad;
}

Mat pair_operator_lift(const Mat& B, const PairBasis& pb) {
  Vec v = skew_to_vec(B, pb);
  return 4.0 * v * v.transpose();
}

double sharp_violation_I(const Mat& B, const Mat& g2, const Spaces& sp) {
  CanonicalPairs cp = canonical_pairing_form(B);
  double lam = richardson_lambda_max(cp.x, sp.N());
  Vec v = skew_to_vec(B, sp.pb);
  double expect = 4.0 * v.dot(g2 * v);
  return (lam - expect) / (2.0 * v.squaredNorm());
}

double sharp_violation_Q(const Mat& B, const Mat& g2, const Spaces& sp) {
  CanonicalPairs cp = canonical_pairing_form(B);
  double lam = richardson_lambda_max(cp.x, sp.N() + 2);
  Mat qg = map_Q(g2, sp);
  Vec v = skew_to_vec(B, sp.pb);
  double expect = 4.0 * v.dot(qg * v);
  return (lam - expect) / (2.0 * v.squaredNorm());
}

namespace {

/// Gradient of lambda_max with respect to the free skew entries b_{mu<nu}.
Mat lambda_gradient_skew(const Mat& B, int N) {
  const int M = static_cast<int>(B.rows());
  CanonicalPairs cp = canonical_pairing_form(B);
  Vec dl = dlambda_dx(cp.x, N);
  Mat g = Mat::Zero(M, M);
  for (int mu = 0; mu < M; ++mu)
    for (int nu = mu + 1; nu < M; ++nu) {
      double s = 0.0;
      for (int k = 0; k < M / 2; ++k)
        s += dl(k) * std::sqrt(2.0) *
             (cp.U(2 * k, mu) * cp.U(2 * k + 1, nu) - cp.U(2 * k, nu) * cp.U(2 * k + 1, mu));
      g(mu, nu) = s;
      g(nu, mu) = -s;
    }
  return g;
}

struct SharpObjective {
  const Mat* g2;
  const Spaces* sp;
  bool two_hole;
  Mat expect_mat;  // Gamma itself or Q(Gamma), contracted against vec B

  SharpObjective(const Mat& g, const Spaces& s, bool q) : g2(&g), sp(&s), two_hole(q) {
    expect_mat = q ? map_Q(g, s) : g;
  }
  int nstates() const { return two_hole ? sp->N() + 2 : sp->N(); }

  double value(const Mat& B) const {
    CanonicalPairs cp = canonical_pairing_form(B);
    double lam = richardson_lambda_max(cp.x, nstates());
    Vec v = skew_to_vec(B, sp->pb);
    return (lam - 4.0 * v.dot(expect_mat * v)) / (2.0 * v.squaredNorm());
  }
};

}  // namespace

namespace {

/// Full gradient of F = (lambda - q)/r as a skew matrix.
Mat sharp_gradient(const SharpObjective& obj, const Mat& B) {
  const Spaces& sp = *obj.sp;
  Vec v = skew_to_vec(B, sp.pb);
  double r = 2.0 * v.squaredNorm();
  CanonicalPairs cp = canonical_pairing_form(B);
  double lam = richardson_lambda_max(cp.x, obj.nstates());
  double q = 4.0 * v.dot(obj.expect_mat * v);
  double f = (lam - q) / r;

  Mat g = lambda_gradient_skew(B, obj.nstates()) / r;
  Vec dq = 8.0 * (obj.expect_mat * v);
  for (int p = 0; p < sp.pb.size(); ++p) {
    auto [a, b] = sp.pb.pair(p);
    double d = (dq(p) + f * 4.0 * v(p)) / r;
    g(a, b) -= d;
    g(b, a) += d;
  }
  return g;
}

SharpSearchResult nlcg_search(const SharpObjective& obj, const Spaces& sp, int restarts,
                              unsigned long seed) {
  const int M = sp.M();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  SharpSearchResult best;
  best.violation = std::numeric_limits<double>::infinity();

  for (int r = 0; r < std::max(1, restarts); ++r) {
    Mat B = Mat::Zero(M, M);
    for (int a = 0; a < M; ++a)
      for (int b = a + 1; b < M; ++b) {
        B(a, b) = unif(rng);
        B(b, a) = -B(a, b);
      }
    B /= skew_to_vec(B, sp.pb).norm();

    double f = obj.value(B);
    Mat g = sharp_gradient(obj, B);
    Mat dir = -g;
    double g2n = g.squaredNorm();

    for (int it = 0; it < 400; ++it) {
      if (std::sqrt(g2n) <= 1e-6) break;
      double slope = g.cwiseProduct(dir).sum();
      if (slope >= 0.0) {
        dir = -g;
        slope = -g2n;
      }
      double alpha = 0.5;
      double fn = f;
      Mat Bn;
      bool accepted = false;
      for (int h = 0; h < 50; ++h) {
        Bn = B + alpha * dir;
        double vn = skew_to_vec(Bn, sp.pb).norm();
        if (vn > 1e-12) {
          Bn /= vn;  // the objective is scale free; stay on the sphere
          fn = obj.value(Bn);
          if (fn <= f + 1e-4 * alpha * slope) {
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      Mat gn = sharp_gradient(obj, Bn);
      double gn2 = gn.squaredNorm();
      double beta = (it % 50 == 49)
                        ? 0.0
                        : std::max(0.0, gn.cwiseProduct(gn - g).sum() / g2n);
      dir = -gn + beta * dir;
      B = Bn;
      f = fn;
      g = gn;
      g2n = gn2;
    }
    if (f < best.violation) {
      best.violation = f;
      best.B = B;
    }
  }
  return best;
}

}  // namespace

SharpSearchResult sharp_search_I(const Mat& g2, const Spaces& sp, int restarts,
                                 unsigned long seed) {
  SharpObjective obj(g2, sp, false);
  return nlcg_search(obj, sp, restarts, seed);
}

SharpSearchResult sharp_search_Q(const Mat& g2, const Spaces& sp, int restarts,
                                 unsigned long seed) {
  SharpObjective obj(g2, sp, true);
  return nlcg_search(obj, sp, restarts, seed);
}

LinearInequality emit_sharp_inequality(const Mat& B, const Spaces& sp, bool two_hole) {
  CanonicalPairs cp = canonical_pairing_form(B);
  Mat W = pair_operator_lift(B, sp.pb);
  LinearInequality out;
  if (!two_hole) {
    out.C = -W;
    out.c = -richardson_lambda_max(cp.x, sp.N());
  } else {
    out.C = -map_Q(W, sp);
    out.c = -richardson_lambda_max(cp.x, sp.N() + 2);
  }
  return out;
}

std::pair<double, double> sharp_G_bounds(const Mat& B, int N) {
  if ((B - B.transpose()).norm() > 1e-10 * (1.0 + B.norm()))
    throw std::invalid_argument("sharp_G_bounds: matrix is not symmetric");
  const int M = static_cast<int>(B.rows());
  if (N < 0 || N > M) throw std::invalid_argument("sharp_G_bounds: bad particle number");
  Eigen::SelfAdjointEigenSolver<Mat> es(B, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();

  double low = ev.head(N).sum();
  double high = ev.tail(N).sum();
  double emax = std::max(low * low, high * high);

  // Exhaustive search for the occupation pattern closest to zero.
  double count = 1.0;
  for (int i = 0; i < N; ++i) count = count * (M - i) / (i + 1);
  if (count > 1e5) throw std::invalid_argument("sharp_G_bounds: state space too large");

  double emin = emax;
  std::vector<int> pick(N);
  for (int i = 0; i < N; ++i) pick[i] = i;
  for (;;) {
    double s = 0.0;
    for (int i : pick) s += ev(i);
    emin = std::min(emin, s * s);
    int i = N - 1;
    while (i >= 0 && pick[i] == M - N + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < N; ++j) pick[j] = pick[j - 1] + 1;
  }
  return {emax, emin};
}

}  // namespace v2dm
