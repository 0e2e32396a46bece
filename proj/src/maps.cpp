#include "v2dm/maps.hpp"

#include <stdexcept>

namespace v2dm {

namespace {

/// Full four-index accessor of a pair-space matrix, zero on coincident indices.
inline double full4(const Mat& a, const PairBasis& pb, int p, int q, int r, int s) {
  if (p == q || r == s) return 0.0;
  return PairBasis::phase(p, q) * PairBasis::phase(r, s) *
         a(pb.slot(p, q), pb.slot(r, s));
}

inline double hom_factor(const Mat& g2, int N) {
  return 2.0 * tb_trace(g2) / (double(N) * (N - 1));
}

}  // namespace

Mat rho_from_gamma(const Mat& g2, const Spaces& sp) {
  return partial_trace(g2, sp.pb) / (sp.N() - 1);
}

Mat map_Q(const Mat& g2, const Spaces& sp) {
  const int d2 = sp.dims.d2;
  Mat out = hom_factor(g2, sp.N()) * Mat::Identity(d2, d2);
  out += g2;
  out -= pair_embed(rho_from_gamma(g2, sp), sp.pb);
  return out;
}

Mat map_G(const Mat& g2, const Spaces& sp) {
  const int M = sp.M();
  const Mat rho = rho_from_gamma(g2, sp);
  Mat out(M * M, M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const int row = a * M + b;
      for (int g = 0; g < M; ++g)
        for (int d = 0; d < M; ++d)
          out(row, g * M + d) = (b == d ? rho(a, g) : 0.0) - full4(g2, sp.pb, a, d, g, b);
    }
  return out;
}

Mat map_G_prime(const Mat& g2, const Spaces& sp) {
  const int M = sp.M();
  const Mat rho = rho_from_gamma(g2, sp);
  Vec rvec(M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) rvec[a * M + b] = rho(a, b);
  Mat out = map_G(g2, sp);
  out -= rvec * rvec.transpose();
  return out;
}

Mat map_T1(const Mat& g2, const Spaces& sp) {
  const int d3 = sp.dims.d3;
  const Mat rho = rho_from_gamma(g2, sp);
  const double hom = hom_factor(g2, sp.N());
  // Ordered complement of one position within a sorted triple.
  static const int rem[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  Mat out = Mat::Zero(d3, d3);
  for (int p = 0; p < d3; ++p) {
    const auto& rt = sp.tb.triple(p);
    for (int q = p; q < d3; ++q) {
      const auto& ct = sp.tb.triple(q);
      double v = (p == q) ? hom : 0.0;
      // Cofactor expansion mixing deltas with one rho (one-body part) and
      // deltas with one pair block (two-body part).
      for (int r = 0; r < 3; ++r) {
        const int rA = rt[rem[r][0]], rB = rt[rem[r][1]];
        for (int c = 0; c < 3; ++c) {
          const int cA = ct[rem[c][0]], cB = ct[rem[c][1]];
          const double sgn = ((r + c) % 2 == 0) ? 1.0 : -1.0;
          const double minor = ((rA == cA && rB == cB) ? 1.0 : 0.0) -
                               ((rA == cB && rB == cA) ? 1.0 : 0.0);
          if (minor != 0.0) v -= sgn * minor * rho(rt[r], ct[c]);
          if (rt[r] == ct[c]) v += sgn * full4(g2, sp.pb, rA, rB, cA, cB);
        }
      }
      out(p, q) = v;
      out(q, p) = v;
    }
  }
  return out;
}

Mat map_T2(const Mat& g2, const Spaces& sp) {
  const int M = sp.M();
  const int d2 = sp.dims.d2;
  const Mat rho = rho_from_gamma(g2, sp);
  Mat out = Mat::Zero(sp.dims.dpph, sp.dims.dpph);
  for (int p = 0; p < d2; ++p) {
    const auto& [a, b] = sp.pb.pair(p);
    for (int g = 0; g < M; ++g) {
      const int row = pph_index(p, g, M);
      for (int q = 0; q < d2; ++q) {
        const auto& [d, e] = sp.pb.pair(q);
        for (int z = 0; z < M; ++z) {
          const int col = pph_index(q, z, M);
          if (col < row) continue;
          double v = 0.0;
          if (p == q) v += rho(g, z);
          if (g == z) v += g2(p, q);
          if (a == d) v -= full4(g2, sp.pb, g, e, z, b);
          if (b == d) v += full4(g2, sp.pb, g, e, z, a);
          if (a == e) v += full4(g2, sp.pb, g, d, z, b);
          if (b == e) v -= full4(g2, sp.pb, g, d, z, a);
          out(row, col) = v;
          out(col, row) = v;
        }
      }
    }
  }
  return out;
}

Mat map_T2prime(const Mat& g2, const Spaces& sp) {
  const int M = sp.M();
  const int dpph = sp.dims.dpph;
  Mat out = Mat::Zero(dpph + M, dpph + M);
  out.topLeftCorner(dpph, dpph) = map_T2(g2, sp);
  out.bottomRightCorner(M, M) = rho_from_gamma(g2, sp);
  for (int p = 0; p < sp.dims.d2; ++p) {
    const auto& [a, b] = sp.pb.pair(p);
    for (int g = 0; g < M; ++g) {
      const int row = pph_index(p, g, M);
      for (int n = 0; n < M; ++n) {
        const double w = full4(g2, sp.pb, a, b, n, g);
        out(row, dpph + n) = w;
        out(dpph + n, row) = w;
      }
    }
  }
  return out;
}

Mat map_gutz_rho(const Mat& g2, const Spaces& sp) {
  const int M = sp.M();
  if (M % 2) throw std::invalid_argument("map_gutz_rho: odd orbital count");
  const Mat rho = rho_from_gamma(g2, sp);
  Mat out = Mat::Zero(M, M);
  for (int a = 0; a < M; ++a) {
    const int ab = a ^ 1;
    for (int b = 0; b < M; ++b) {
      const int bb = b ^ 1;
      double v = rho(a, b);
      v -= full4(g2, sp.pb, a, bb, b, bb);
      v -= full4(g2, sp.pb, a, ab, b, ab);
      if (a == b) v += rho(ab, ab);
      out(a, b) = v;
    }
  }
  return 0.5 * (out + out.transpose());
}

Mat map_gutz_q(const Mat& g2, const Spaces& sp) {
  const int M = sp.M();
  if (M % 2) throw std::invalid_argument("map_gutz_q: odd orbital count");
  const Mat rho = rho_from_gamma(g2, sp);
  const double hom = hom_factor(g2, sp.N());
  Mat out = Mat::Zero(M, M);
  for (int a = 0; a < M; ++a) {
    const int ab = a ^ 1;
    for (int b = 0; b < M; ++b) {
      const int bb = b ^ 1;
      double v = full4(g2, sp.pb, bb, b, bb, a) + full4(g2, sp.pb, ab, b, ab, a);
      v -= rho(a, b);
      if (a == b) v += hom - rho(ab, ab);
      out(a, b) = v;
    }
  }
  return 0.5 * (out + out.transpose());
}

Mat apply_cond(Cond c, const Mat& g2, const Spaces& sp) {
  switch (c) {
    case Cond::I: return g2;
    case Cond::Q: return map_Q(g2, sp);
    case Cond::G: return map_G(g2, sp);
    case Cond::T1: return map_T1(g2, sp);
    case Cond::T2: return map_T2(g2, sp);
    case Cond::T2P: return map_T2prime(g2, sp);
    case Cond::GutzRho: return map_gutz_rho(g2, sp);
    case Cond::GutzQ: return map_gutz_q(g2, sp);
  }
  throw std::logic_error("apply_cond: unreachable");
}

Mat adj_Q(const Mat& a, const Spaces& sp) {
  const int N = sp.N();
  const int d2 = sp.dims.d2;
  Mat out = (2.0 * tb_trace(a) / (double(N) * (N - 1))) * Mat::Identity(d2, d2);
  out += a;
  out -= pair_embed(partial_trace(a, sp.pb), sp.pb) / (N - 1);
  return out;
}

Mat adj_G(const Mat& a, const Spaces& sp) {
  const int M = sp.M(), N = sp.N();
  // Partial trace over the hole index of the particle-hole matrix.
  Mat abar = Mat::Zero(M, M);
  for (int al = 0; al < M; ++al)
    for (int ga = 0; ga < M; ++ga) {
      double s = 0.0;
      for (int l = 0; l < M; ++l) s += a(al * M + l, ga * M + l);
      abar(al, ga) = s;
    }
  abar = 0.5 * (abar + abar.transpose());
  Mat out = pair_embed(abar, sp.pb) / (N - 1);
  const int d2 = sp.dims.d2;
  for (int p = 0; p < d2; ++p) {
    const auto& [al, be] = sp.pb.pair(p);
    for (int q = p; q < d2; ++q) {
      const auto& [ga, de] = sp.pb.pair(q);
      double v = -a(al * M + de, ga * M + be) + a(be * M + de, ga * M + al) +
                 a(al * M + ga, de * M + be) - a(be * M + ga, de * M + al);
      // Symmetrize explicitly: the exchange combination of a general
      // symmetric A need not be symmetric slot-to-slot.
      double vt = -a(ga * M + be, al * M + de) + a(de * M + be, al * M + ga) +
                  a(ga * M + al, be * M + de) - a(de * M + al, be * M + ga);
      v = 0.5 * (v + vt);
      out(p, q) += v;
      out(q, p) += v;
      if (p == q) out(p, q) -= v;
    }
  }
  return out;
}

Mat adj_T1(const Mat& a, const Spaces& sp) {
  const int M = sp.M(), N = sp.N();
  const int d2 = sp.dims.d2, d3 = sp.dims.d3;
  // Single partial trace: abar_{(ab);(cd)} = sum_l A_{abl;cdl} (full indices).
  Mat abar = Mat::Zero(d2, d2);
  // Double partial trace: addbar_{a;c} = sum_{l<k} 2 A_{alk;clk}.
  Mat addbar = Mat::Zero(M, M);
  auto full6 = [&](int x, int y, int z, int u, int v, int w) -> double {
    const double s1 = TripleBasis::phase(x, y, z);
    if (s1 == 0.0) return 0.0;
    const double s2 = TripleBasis::phase(u, v, w);
    if (s2 == 0.0) return 0.0;
    return s1 * s2 * a(sp.tb.slot(x, y, z), sp.tb.slot(u, v, w));
  };
  for (int p = 0; p < d2; ++p) {
    const auto& [al, be] = sp.pb.pair(p);
    for (int q = p; q < d2; ++q) {
      const auto& [ga, de] = sp.pb.pair(q);
      double s = 0.0;
      for (int l = 0; l < M; ++l) s += full6(al, be, l, ga, de, l);
      abar(p, q) = s;
      abar(q, p) = s;
    }
  }
  for (int al = 0; al < M; ++al)
    for (int ga = al; ga < M; ++ga) {
      double s = 0.0;
      for (int l = 0; l < M; ++l)
        for (int k = l + 1; k < M; ++k) s += 2.0 * full6(al, l, k, ga, l, k);
      addbar(al, ga) = s;
      addbar(ga, al) = s;
    }
  double tr3 = 0.0;
  for (int p = 0; p < d3; ++p) tr3 += a(p, p);
  Mat out = (2.0 * tr3 / (double(N) * (N - 1))) * Mat::Identity(d2, d2);
  out += abar;
  out -= pair_embed(addbar, sp.pb) / (2.0 * (N - 1));
  return out;
}

Mat adj_T2(const Mat& a, const Spaces& sp) {
  const int M = sp.M(), N = sp.N();
  const int d2 = sp.dims.d2;
  // Trace over the pair index: atil2_{g;z} = sum_{full ab} A_{(ab)g;(ab)z}.
  Mat atil2 = Mat::Zero(M, M);
  for (int g = 0; g < M; ++g)
    for (int z = 0; z < M; ++z) {
      double s = 0.0;
      for (int p = 0; p < d2; ++p) s += a(pph_index(p, g, M), pph_index(p, z, M));
      atil2(g, z) = 2.0 * s;
    }
  atil2 = 0.5 * (atil2 + atil2.transpose());
  // Trace over the hole index: abar_{(ab);(de)} = sum_l A_{(ab)l;(de)l}.
  Mat abar = Mat::Zero(d2, d2);
  for (int p = 0; p < d2; ++p)
    for (int q = p; q < d2; ++q) {
      double s = 0.0;
      for (int l = 0; l < M; ++l) s += a(pph_index(p, l, M), pph_index(q, l, M));
      abar(p, q) = s;
      abar(q, p) = s;
    }
  // Mixed contraction: atil_{d a; b g} = sum_l A^full_{(l d) a; (l b) g}.
  // Stored as an M^2 x M^2 table indexed (d*M+a, b*M+g).
  Mat atil = Mat::Zero(M * M, M * M);
  for (int d = 0; d < M; ++d)
    for (int al = 0; al < M; ++al)
      for (int b = 0; b < M; ++b)
        for (int g = 0; g < M; ++g) {
          double s = 0.0;
          for (int l = 0; l < M; ++l) {
            if (l == d || l == b) continue;
            s += PairBasis::phase(l, d) * PairBasis::phase(l, b) *
                 a(pph_index(sp.pb.slot(l, d), al, M), pph_index(sp.pb.slot(l, b), g, M));
          }
          atil(d * M + al, b * M + g) = s;
        }
  Mat out = pair_embed(atil2, sp.pb) / (2.0 * (N - 1));
  out += abar;
  for (int p = 0; p < d2; ++p) {
    const auto& [al, be] = sp.pb.pair(p);
    for (int q = p; q < d2; ++q) {
      const auto& [ga, de] = sp.pb.pair(q);
      double v = atil(de * M + al, be * M + ga) - atil(de * M + be, al * M + ga) -
                 atil(ga * M + al, be * M + de) + atil(ga * M + be, al * M + de);
      double vt = atil(be * M + ga, de * M + al) - atil(be * M + de, ga * M + al) -
                  atil(al * M + ga, de * M + be) + atil(al * M + de, ga * M + be);
      v = 0.5 * (v + vt);
      out(p, q) -= v;
      out(q, p) -= v;
      if (p == q) out(p, q) += v;
    }
  }
  return out;
}

Mat adj_T2prime(const Mat& a, const Spaces& sp) {
  const int M = sp.M(), N = sp.N();
  const int dpph = sp.dims.dpph;
  Mat out = adj_T2(a.topLeftCorner(dpph, dpph), sp);
  const Mat aw = a.topRightCorner(dpph, M);
  const Mat ar = 0.5 * (a.bottomRightCorner(M, M) + a.bottomRightCorner(M, M).transpose());
  const int d2 = sp.dims.d2;
  for (int p = 0; p < d2; ++p) {
    const auto& [al, be] = sp.pb.pair(p);
    for (int q = p; q < d2; ++q) {
      const auto& [ga, de] = sp.pb.pair(q);
      const double v = aw(pph_index(p, de, M), ga) - aw(pph_index(p, ga, M), de) +
                       aw(pph_index(q, be, M), al) - aw(pph_index(q, al, M), be);
      out(p, q) += v;
      out(q, p) += v;
      if (p == q) out(p, q) -= v;
    }
  }
  out += pair_embed(ar, sp.pb) / (N - 1);
  return out;
}

Mat adj_gutz_rho(const Mat& a_in, const Spaces& sp) {
  const int M = sp.M(), N = sp.N();
  const Mat a = 0.5 * (a_in + a_in.transpose());
  Vec diag_partner(M);
  for (int al = 0; al < M; ++al) diag_partner[al] = a(al ^ 1, al ^ 1);
  Mat onebody = a + Mat(diag_partner.asDiagonal());
  Mat out = pair_embed(onebody, sp.pb) / (N - 1);
  auto add_full = [&](int x, int y, int u, int v, double w) {
    // Accumulates w * (full slot element (xy);(uv)) symmetrically.
    if (x == y || u == v) return;
    const double s = PairBasis::phase(x, y) * PairBasis::phase(u, v) * w;
    const int p = sp.pb.slot(x, y), q = sp.pb.slot(u, v);
    out(p, q) += 0.5 * s;
    out(q, p) += 0.5 * s;
  };
  for (int al = 0; al < M; ++al)
    for (int be = 0; be < M; ++be) {
      const double w = a(al, be);
      if (w == 0.0) continue;
      add_full(al, be ^ 1, be, be ^ 1, -w);
      add_full(al, al ^ 1, be, al ^ 1, -w);
    }
  return out;
}

Mat adj_gutz_q(const Mat& a_in, const Spaces& sp) {
  const int M = sp.M(), N = sp.N();
  const Mat a = 0.5 * (a_in + a_in.transpose());
  const int d2 = sp.dims.d2;
  Mat out = (2.0 * a.trace() / (double(N) * (N - 1))) * Mat::Identity(d2, d2);
  Vec diag_partner(M);
  for (int al = 0; al < M; ++al) diag_partner[al] = a(al ^ 1, al ^ 1);
  Mat onebody = a + Mat(diag_partner.asDiagonal());
  out -= pair_embed(onebody, sp.pb) / (N - 1);
  auto add_full = [&](int x, int y, int u, int v, double w) {
    if (x == y || u == v) return;
    const double s = PairBasis::phase(x, y) * PairBasis::phase(u, v) * w;
    const int p = sp.pb.slot(x, y), q = sp.pb.slot(u, v);
    out(p, q) += 0.5 * s;
    out(q, p) += 0.5 * s;
  };
  for (int al = 0; al < M; ++al)
    for (int be = 0; be < M; ++be) {
      const double w = a(al, be);
      if (w == 0.0) continue;
      add_full(be ^ 1, be, be ^ 1, al, w);
      add_full(al ^ 1, be, al ^ 1, al, w);
    }
  return out;
}

Mat adj_cond(Cond c, const Mat& a, const Spaces& sp) {
  switch (c) {
    case Cond::I: return 0.5 * (a + a.transpose());
    case Cond::Q: return adj_Q(a, sp);
    case Cond::G: return adj_G(a, sp);
    case Cond::T1: return adj_T1(a, sp);
    case Cond::T2: return adj_T2(a, sp);
    case Cond::T2P: return adj_T2prime(a, sp);
    case Cond::GutzRho: return adj_gutz_rho(a, sp);
    case Cond::GutzQ: return adj_gutz_q(a, sp);
  }
  throw std::logic_error("adj_cond: unreachable");
}

Mat adj_G_prime_linear(const Mat& a, const Spaces& sp) { return adj_G(a, sp); }

Carrier apply_conditions(const Mat& g2, const ConditionSet& cs, const Spaces& sp,
                         const std::vector<Mat>* C0) {
  Carrier out;
  out.blocks.reserve(cs.conds().size());
  for (Cond c : cs.conds()) out.blocks.emplace_back(c, apply_cond(c, g2, sp));
  const int m = C0 ? static_cast<int>(C0->size()) : 0;
  out.ineq = Vec::Zero(m);
  for (int j = 0; j < m; ++j) out.ineq[j] = tb_inner(g2, (*C0)[j]);
  return out;
}

Mat collapse(const Carrier& a, const Spaces& sp, const std::vector<Mat>* C0) {
  Mat out = Mat::Zero(sp.dims.d2, sp.dims.d2);
  for (const auto& [c, blk] : a.blocks) out += adj_cond(c, blk, sp);
  if (C0) {
    if (static_cast<int>(C0->size()) != a.ineq.size())
      throw std::invalid_argument("collapse: inequality count mismatch");
    for (int j = 0; j < a.ineq.size(); ++j) out += a.ineq[j] * (*C0)[j];
  }
  return out;
}

}  // namespace v2dm
