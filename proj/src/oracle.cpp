#include "v2dm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>

namespace v2dm {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Shared FockBasis instances keyed by (M, N).
const FockBasis& cached_basis(int M, int N) {
  static std::map<std::pair<int, int>, std::unique_ptr<FockBasis>> cache;
  auto& slot = cache[{M, N}];
  if (!slot) slot = std::make_unique<FockBasis>(M, N);
  return *slot;
}

}  // namespace

FockBasis::FockBasis(int M, int N) : M_(M), N_(N) {
  if (M < 1 || M > 62 || N < 0 || N > M)
    throw std::invalid_argument("FockBasis: need 0 <= N <= M <= 62");
  if (binom(M, N) > 2.5e5)
    throw std::invalid_argument("FockBasis: sector dimension exceeds the cap");
  if (N == 0) {
    masks_.push_back(0);
    return;
  }
  std::uint64_t m = (std::uint64_t(1) << N) - 1;
  const std::uint64_t limit = std::uint64_t(1) << M;
  while (m < limit) {
    masks_.push_back(m);
    const std::uint64_t c = m & (~m + 1);
    const std::uint64_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
}

int FockBasis::index(std::uint64_t m) const {
  auto it = std::lower_bound(masks_.begin(), masks_.end(), m);
  if (it == masks_.end() || *it != m) return -1;
  return static_cast<int>(it - masks_.begin());
}

double fermi_sign(std::uint64_t m, int o) {
  const std::uint64_t below = m & ((std::uint64_t(1) << o) - 1);
  return (__builtin_popcountll(below) & 1) ? -1.0 : 1.0;
}

Vec apply_op_string(const Vec& psi, const std::vector<FermiOp>& ops,
                    const FockBasis& from, const FockBasis& to) {
  int dn = 0;
  for (const auto& op : ops) dn += op.dagger ? 1 : -1;
  if (from.particles() + dn != to.particles() || from.orbitals() != to.orbitals())
    throw std::invalid_argument("apply_op_string: sector mismatch");
  Vec out = Vec::Zero(to.dim());
  for (int i = 0; i < from.dim(); ++i) {
    const double c0 = psi[i];
    if (c0 == 0.0) continue;
    std::uint64_t m = from.mask(i);
    double s = c0;
    bool dead = false;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
      const std::uint64_t bit = std::uint64_t(1) << it->orbital;
      if (it->dagger ? (m & bit) : !(m & bit)) {
        dead = true;
        break;
      }
      s *= fermi_sign(m, it->orbital);
      m ^= bit;
    }
    if (dead) continue;
    const int j = to.index(m);
    if (j < 0) throw std::logic_error("apply_op_string: image outside target sector");
    out[j] += s;
  }
  return out;
}

double expectation(const Vec& psi, const std::vector<FermiOp>& ops, const FockBasis& fb) {
  int dn = 0;
  for (const auto& op : ops) dn += op.dagger ? 1 : -1;
  if (dn != 0) throw std::invalid_argument("expectation: operator changes particle number");
  const int M = fb.orbitals();
  // Apply one op at a time, tracking the intermediate sector.
  Vec cur = psi;
  int n = fb.particles();
  const FockBasis* curb = &fb;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    const int n2 = n + (it->dagger ? 1 : -1);
    if (n2 < 0 || n2 > M) return 0.0;
    const FockBasis& next = cached_basis(M, n2);
    cur = apply_op_string(cur, {*it}, *curb, next);
    curb = &next;
    n = n2;
  }
  return psi.dot(cur);
}

namespace {

/// Enumerates matrix elements <m'|H|m> as callbacks f(row, col, value).
void for_each_element(const Hamiltonian& H, const FockBasis& fb,
                      const std::function<void(int, int, double)>& f) {
  const int M = H.M;
  PairBasis pb(M);
  // Nonzero structure extracted once.
  std::vector<std::array<int, 2>> t_idx;
  std::vector<double> t_val;
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      if (H.t(a, b) != 0.0) {
        t_idx.push_back({a, b});
        t_val.push_back(H.t(a, b));
      }
  const int d2 = pb.size();
  std::vector<std::vector<std::pair<int, double>>> v_col(d2);
  for (int q = 0; q < d2; ++q)
    for (int p = 0; p < d2; ++p)
      if (H.V(p, q) != 0.0) v_col[q].push_back({p, H.V(p, q)});

  for (int i = 0; i < fb.dim(); ++i) {
    const std::uint64_t m = fb.mask(i);
    // One-body: a+_a a_b.
    for (size_t k = 0; k < t_idx.size(); ++k) {
      const int a = t_idx[k][0], b = t_idx[k][1];
      const std::uint64_t bb = std::uint64_t(1) << b, ba = std::uint64_t(1) << a;
      if (!(m & bb)) continue;
      const std::uint64_t m2 = m ^ bb;
      if (m2 & ba) continue;
      const double s = fermi_sign(m, b) * fermi_sign(m2, a);
      f(fb.index(m2 | ba), i, s * t_val[k]);
    }
    // Two-body: V_pq a+_a a+_b a_d a_c with p=(a<b), q=(c<d).
    for (int q = 0; q < d2; ++q) {
      if (v_col[q].empty()) continue;
      const auto& [c, d] = pb.pair(q);
      const std::uint64_t bc = std::uint64_t(1) << c, bd = std::uint64_t(1) << d;
      if (!(m & bc) || !(m & bd)) continue;
      std::uint64_t m2 = m ^ bc;
      double s = fermi_sign(m, c);
      s *= fermi_sign(m2, d);
      m2 ^= bd;
      for (const auto& [p, v] : v_col[q]) {
        const auto& [a, b] = pb.pair(p);
        const std::uint64_t baa = std::uint64_t(1) << a, bab = std::uint64_t(1) << b;
        if ((m2 & bab) || (m2 & baa)) continue;
        const std::uint64_t m3 = m2 | bab;
        const double s2 = fermi_sign(m2, b) * fermi_sign(m3, a);
        f(fb.index(m3 | baa), i, s * s2 * v);
      }
    }
  }
}

std::pair<double, Vec> lanczos_smallest(int dim, const std::function<Vec(const Vec&)>& Av,
                                        double tol, unsigned long seed) {
  const int kmax = std::min(dim, 160);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vec v0(dim);
  for (int i = 0; i < dim; ++i) v0[i] = gauss(rng);
  v0.normalize();

  double theta = 0.0;
  Vec ritz = v0;
  for (int restart = 0; restart < 60; ++restart) {
    std::vector<Vec> basis;
    std::vector<double> alpha, beta;
    Vec v = ritz.normalized();
    Vec w;
    basis.push_back(v);
    bool converged = false;
    for (int k = 0; k < kmax; ++k) {
      w = Av(basis[k]);
      const double a = basis[k].dot(w);
      alpha.push_back(a);
      w -= a * basis[k];
      if (k > 0) w -= beta[k - 1] * basis[k - 1];
      // Full reorthogonalization, twice.
      for (int rep = 0; rep < 2; ++rep)
        for (const Vec& u : basis) w -= u.dot(w) * u;
      const double b = w.norm();
      // Ritz extraction.
      const int kk = k + 1;
      Mat T = Mat::Zero(kk, kk);
      for (int i = 0; i < kk; ++i) T(i, i) = alpha[i];
      for (int i = 0; i + 1 < kk; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
      Eigen::SelfAdjointEigenSolver<Mat> es(T);
      theta = es.eigenvalues()[0];
      const Vec y = es.eigenvectors().col(0);
      const double resid = b * std::abs(y[kk - 1]);
      const bool done = resid <= tol * std::max(1.0, std::abs(theta)) || kk == dim;
      if (done || k == kmax - 1) {
        ritz = Vec::Zero(dim);
        for (int i = 0; i < kk; ++i) ritz += y[i] * basis[i];
        ritz.normalize();
        converged = done;
        break;
      }
      beta.push_back(b);
      basis.push_back(w / b);
    }
    if (converged) return {theta, ritz};
  }
  return {theta, ritz};
}

}  // namespace

Mat build_dense_hamiltonian(const Hamiltonian& H, const FockBasis& fb) {
  Mat out = Mat::Zero(fb.dim(), fb.dim());
  for_each_element(H, fb, [&](int r, int c, double v) { out(r, c) += v; });
  return out;
}

Vec apply_hamiltonian(const Hamiltonian& H, const FockBasis& fb, const Vec& psi) {
  Vec out = Vec::Zero(fb.dim());
  for_each_element(H, fb, [&](int r, int c, double v) { out[r] += v * psi[c]; });
  return out;
}

GroundState exact_ground(const Hamiltonian& H, int N) {
  const FockBasis& fb = cached_basis(H.M, N);
  if (fb.dim() == 1) {
    Vec psi = Vec::Ones(1);
    const Mat h = build_dense_hamiltonian(H, fb);
    return {h(0, 0), psi};
  }
  if (fb.dim() <= 4000) {
    const Mat h = build_dense_hamiltonian(H, fb);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    return {es.eigenvalues()[0], es.eigenvectors().col(0)};
  }
  auto [e, psi] = lanczos_smallest(
      fb.dim(), [&](const Vec& v) { return apply_hamiltonian(H, fb, v); }, 1e-10, 12345);
  return {e, psi};
}

Mat exact_2dm(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  PairBasis pb(M);
  Mat g2 = Mat::Zero(pb.size(), pb.size());
  for (int i = 0; i < fb.dim(); ++i) {
    const double c0 = psi[i];
    if (c0 == 0.0) continue;
    const std::uint64_t m = fb.mask(i);
    for (int c = 0; c < M; ++c) {
      if (!(m & (std::uint64_t(1) << c))) continue;
      for (int d = c + 1; d < M; ++d) {
        if (!(m & (std::uint64_t(1) << d))) continue;
        std::uint64_t m2 = m ^ (std::uint64_t(1) << c);
        double s = fermi_sign(m, c) * fermi_sign(m2, d);
        m2 ^= std::uint64_t(1) << d;
        const int q = pb.slot(c, d);
        for (int a = 0; a < M; ++a) {
          if (m2 & (std::uint64_t(1) << a)) continue;
          for (int b = a + 1; b < M; ++b) {
            if (m2 & (std::uint64_t(1) << b)) continue;
            const std::uint64_t m3 = m2 | (std::uint64_t(1) << b);
            const double s2 = fermi_sign(m2, b) * fermi_sign(m3, a);
            const int j = fb.index(m3 | (std::uint64_t(1) << a));
            g2(pb.slot(a, b), q) += s * s2 * c0 * psi[j];
          }
        }
      }
    }
  }
  return g2;
}

Mat exact_1dm(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  Mat rho = Mat::Zero(M, M);
  for (int i = 0; i < fb.dim(); ++i) {
    const double c0 = psi[i];
    if (c0 == 0.0) continue;
    const std::uint64_t m = fb.mask(i);
    for (int b = 0; b < M; ++b) {
      if (!(m & (std::uint64_t(1) << b))) continue;
      const std::uint64_t m2 = m ^ (std::uint64_t(1) << b);
      const double s = fermi_sign(m, b);
      for (int a = 0; a < M; ++a) {
        if (m2 & (std::uint64_t(1) << a)) continue;
        const int j = fb.index(m2 | (std::uint64_t(1) << a));
        rho(a, b) += s * fermi_sign(m2, a) * c0 * psi[j];
      }
    }
  }
  return rho;
}

Mat exact_ph_matrix(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  Mat g = Mat::Zero(M * M, M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      for (int d = 0; d < M; ++d)
        for (int gg = 0; gg < M; ++gg)
          g(a * M + b, gg * M + d) = expectation(
              psi, {{a, true}, {b, false}, {d, true}, {gg, false}}, fb);
  return g;
}

Mat exact_2hole(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  PairBasis pb(M);
  Mat q = Mat::Zero(pb.size(), pb.size());
  for (int p = 0; p < pb.size(); ++p) {
    const auto& [a, b] = pb.pair(p);
    for (int r = 0; r < pb.size(); ++r) {
      const auto& [c, d] = pb.pair(r);
      q(p, r) = expectation(psi, {{a, false}, {b, false}, {d, true}, {c, true}}, fb);
    }
  }
  return q;
}

Mat exact_t1_matrix(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  TripleBasis tb(M);
  Mat t1 = Mat::Zero(tb.size(), tb.size());
  for (int p = 0; p < tb.size(); ++p) {
    const auto& [a, b, c] = tb.triple(p);
    for (int q = 0; q < tb.size(); ++q) {
      const auto& [d, e, f] = tb.triple(q);
      const double m1 = expectation(
          psi, {{c, false}, {b, false}, {a, false}, {d, true}, {e, true}, {f, true}}, fb);
      const double m2 = expectation(
          psi, {{a, true}, {b, true}, {c, true}, {f, false}, {e, false}, {d, false}}, fb);
      t1(p, q) = m1 + m2;
    }
  }
  return t1;
}

Mat exact_t2_matrix(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  PairBasis pb(M);
  const int dpph = pb.size() * M;
  Mat t2 = Mat::Zero(dpph, dpph);
  for (int p = 0; p < pb.size(); ++p) {
    const auto& [a, b] = pb.pair(p);
    for (int g = 0; g < M; ++g) {
      const int row = pph_index(p, g, M);
      for (int q = 0; q < pb.size(); ++q) {
        const auto& [d, e] = pb.pair(q);
        for (int z = 0; z < M; ++z) {
          const int col = pph_index(q, z, M);
          // O_p = a+_g a_b a_a, O+_q = a+_d a+_e a_z.
          const double m1 = expectation(
              psi, {{g, true}, {b, false}, {a, false}, {d, true}, {e, true}, {z, false}}, fb);
          const double m2 = expectation(
              psi, {{d, true}, {e, true}, {z, false}, {g, true}, {b, false}, {a, false}}, fb);
          t2(row, col) = m1 + m2;
        }
      }
    }
  }
  return t2;
}

Mat exact_t2prime_matrix(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  PairBasis pb(M);
  const int dpph = pb.size() * M;
  Mat out = Mat::Zero(dpph + M, dpph + M);
  out.topLeftCorner(dpph, dpph) = exact_t2_matrix(psi, fb);
  const Mat g2 = exact_2dm(psi, fb);
  out.bottomRightCorner(M, M) = exact_1dm(psi, fb);
  for (int p = 0; p < pb.size(); ++p) {
    const auto& [a, b] = pb.pair(p);
    for (int g = 0; g < M; ++g) {
      const int row = pph_index(p, g, M);
      for (int n = 0; n < M; ++n) {
        double w = 0.0;
        if (n != g) {
          const auto [q, s] = pair_index(pb, n, g);
          w = s * g2(p, q);
        }
        out(row, dpph + n) = w;
        out(dpph + n, row) = w;
      }
    }
  }
  return out;
}

Mat exact_gutz_rho(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  Mat out = Mat::Zero(M, M);
  for (int a = 0; a < M; ++a) {
    const int abar = a ^ 1;
    for (int b = 0; b < M; ++b) {
      const int bbar = b ^ 1;
      // <(1-n_abar) a+_a a_b (1-n_bbar)>, with 1-n_o = a_o a+_o.
      out(a, b) = expectation(psi,
                              {{abar, false}, {abar, true}, {a, true}, {b, false},
                               {bbar, false}, {bbar, true}},
                              fb);
    }
  }
  return out;
}

Mat exact_gutz_q(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  Mat out = Mat::Zero(M, M);
  for (int a = 0; a < M; ++a) {
    const int abar = a ^ 1;
    for (int b = 0; b < M; ++b) {
      const int bbar = b ^ 1;
      // <a_a (1-n_abar)(1-n_bbar) a+_b>.
      out(a, b) = expectation(psi,
                              {{a, false}, {abar, false}, {abar, true},
                               {bbar, false}, {bbar, true}, {b, true}},
                              fb);
    }
  }
  return out;
}

double exact_spin_squared(const Vec& psi, const FockBasis& fb) {
  const int M = fb.orbitals();
  if (M % 2) throw std::invalid_argument("exact_spin_squared: odd orbital count");
  const int L = M / 2;
  // S+ = sum_i a+_{i up} a_{i down} maps the sector into itself.
  Vec sp = Vec::Zero(fb.dim());
  for (int i = 0; i < L; ++i)
    sp += apply_op_string(psi, {{2 * i, true}, {2 * i + 1, false}}, fb, fb);
  double val = sp.squaredNorm();  // <S- S+>
  for (int k = 0; k < fb.dim(); ++k) {
    const std::uint64_t m = fb.mask(k);
    int nu = 0, nd = 0;
    for (int i = 0; i < L; ++i) {
      nu += (m >> (2 * i)) & 1;
      nd += (m >> (2 * i + 1)) & 1;
    }
    const double sz = 0.5 * (nu - nd);
    val += psi[k] * psi[k] * sz * (sz + 1.0);
  }
  return val;
}

double hopping_min_full(int L, int N, double t) {
  std::vector<double> eps;
  eps.reserve(2 * L);
  for (int n = 0; n < L; ++n) {
    const double e = -2.0 * t * std::cos(2.0 * M_PI * n / L);
    eps.push_back(e);
    eps.push_back(e);
  }
  std::sort(eps.begin(), eps.end());
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += eps[i];
  return sum;
}

double hopping_min_singly_occupied(int L, int N, double t) {
  if (N > L) throw std::invalid_argument("hopping_min_singly_occupied: N > L");
  const Hamiltonian H = hubbard_1d(L, t, 0.0);
  const FockBasis& full = cached_basis(2 * L, N);
  // Masks without doubly occupied sites.
  std::uint64_t even = 0;
  for (int i = 0; i < L; ++i) even |= std::uint64_t(1) << (2 * i);
  std::vector<std::uint64_t> sub;
  std::vector<int> back(full.dim(), -1);
  for (int i = 0; i < full.dim(); ++i) {
    const std::uint64_t m = full.mask(i);
    if ((m & (m >> 1) & even) == 0) {
      back[i] = static_cast<int>(sub.size());
      sub.push_back(m);
    }
  }
  const int dim = static_cast<int>(sub.size());
  if (dim > 1000000) throw std::invalid_argument("hopping_min_singly_occupied: subspace too large");
  auto matvec = [&](const Vec& v) {
    Vec f = Vec::Zero(full.dim());
    for (int i = 0; i < full.dim(); ++i)
      if (back[i] >= 0) f[i] = v[back[i]];
    const Vec g = apply_hamiltonian(H, full, f);
    Vec out = Vec::Zero(dim);
    for (int i = 0; i < full.dim(); ++i)
      if (back[i] >= 0) out[back[i]] = g[i];
    return out;
  };
  if (dim <= 2000) {
    Mat h = Mat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
      Vec e = Vec::Zero(dim);
      e[j] = 1.0;
      h.col(j) = matvec(e);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    return es.eigenvalues()[0];
  }
  return lanczos_smallest(dim, matvec, 1e-10, 12345).first;
}

EnergyCurve energy_vs_N(const Hamiltonian& H, int n_min, int n_max) {
  EnergyCurve curve;
  for (int n = n_min; n <= n_max; ++n) {
    curve.n.push_back(n);
    curve.energy.push_back(exact_ground(H, n).energy);
  }
  // Lower convex hull, monotone chain over (n, E).
  const int k = static_cast<int>(curve.n.size());
  std::vector<int>& hull = curve.hull;
  for (int i = 0; i < k; ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull.back();
      const double cross = (curve.n[b] - curve.n[a]) * (curve.energy[i] - curve.energy[b]) -
                           (curve.energy[b] - curve.energy[a]) * (curve.n[i] - curve.n[b]);
      if (cross <= 1e-12 * (1.0 + std::abs(curve.energy[b]))) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  return curve;
}

double pair_op_max_eig(const Mat& B, int N) {
  const int M = static_cast<int>(B.rows());
  if (B.cols() != M) throw std::invalid_argument("pair_op_max_eig: square matrix required");
  if ((B + B.transpose()).norm() > 1e-12 * (1.0 + B.norm()))
    throw std::invalid_argument("pair_op_max_eig: skew-symmetric matrix required");
  if (N < 2) return 0.0;
  const FockBasis& fbn = cached_basis(M, N);
  const FockBasis& fbm = cached_basis(M, N - 2);
  if (double(fbn.dim()) > 2e4)
    throw std::invalid_argument("pair_op_max_eig: sector dimension exceeds the cap");
  // Bhat = sum_{a<b} 2 B_ab (sign) removing the pair; assemble it sparsely.
  auto apply_B = [&](const Vec& v) {
    Vec out = Vec::Zero(fbm.dim());
    for (int i = 0; i < fbn.dim(); ++i) {
      const double c0 = v[i];
      if (c0 == 0.0) continue;
      const std::uint64_t m = fbn.mask(i);
      for (int a = 0; a < M; ++a) {
        if (!(m & (std::uint64_t(1) << a))) continue;
        for (int b = a + 1; b < M; ++b) {
          if (!(m & (std::uint64_t(1) << b))) continue;
          if (B(a, b) == 0.0) continue;
          // a_b a_a with a_a acting first.
          std::uint64_t m2 = m ^ (std::uint64_t(1) << a);
          double s = fermi_sign(m, a) * fermi_sign(m2, b);
          m2 ^= std::uint64_t(1) << b;
          out[fbm.index(m2)] += 2.0 * B(a, b) * s * c0;
        }
      }
    }
    return out;
  };
  auto apply_Bt = [&](const Vec& w) {
    Vec out = Vec::Zero(fbn.dim());
    for (int i = 0; i < fbn.dim(); ++i) {
      const std::uint64_t m = fbn.mask(i);
      for (int a = 0; a < M; ++a) {
        if (!(m & (std::uint64_t(1) << a))) continue;
        for (int b = a + 1; b < M; ++b) {
          if (!(m & (std::uint64_t(1) << b))) continue;
          if (B(a, b) == 0.0) continue;
          std::uint64_t m2 = m ^ (std::uint64_t(1) << a);
          double s = fermi_sign(m, a) * fermi_sign(m2, b);
          m2 ^= std::uint64_t(1) << b;
          out[i] += 2.0 * B(a, b) * s * w[fbm.index(m2)];
        }
      }
    }
    return out;
  };
  if (fbn.dim() <= 1500) {
    Mat bop(fbm.dim(), fbn.dim());
    for (int j = 0; j < fbn.dim(); ++j) {
      Vec e = Vec::Zero(fbn.dim());
      e[j] = 1.0;
      bop.col(j) = apply_B(e);
    }
    const Mat t = bop.transpose() * bop;
    Eigen::SelfAdjointEigenSolver<Mat> es(t);
    return es.eigenvalues()[fbn.dim() - 1];
  }
  const auto res = lanczos_smallest(
      fbn.dim(), [&](const Vec& v) { return Vec(-apply_Bt(apply_B(v))); }, 1e-11, 777);
  return -res.first;
}

}  // namespace v2dm
