#include "v2dm/basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace v2dm {

BasisDims basis_dims(int M, int N) {
  if (M < 3 || N < 2 || N >= M)
    throw std::invalid_argument("basis_dims: need 2 <= N < M and M >= 3");
  BasisDims d;
  d.M = M;
  d.N = N;
  d.d2 = M * (M - 1) / 2;
  d.d3 = M * (M - 1) * (M - 2) / 6;
  d.dph = M * M;
  d.dpph = d.d2 * M;
  return d;
}

PairBasis::PairBasis(int M) : M_(M), d2_(M * (M - 1) / 2) {
  slot_.setConstant(M, M, -1);
  pairs_.reserve(d2_);
  int s = 0;
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b) {
      slot_(a, b) = s;
      slot_(b, a) = s;
      pairs_.emplace_back(a, b);
      ++s;
    }
}

std::pair<int, double> pair_index(const PairBasis& pb, int a, int b) {
  const int M = pb.orbitals();
  if (a < 0 || b < 0 || a >= M || b >= M || a == b)
    throw std::domain_error("pair_index: orbitals must be distinct and < M");
  return {pb.slot(a, b), PairBasis::phase(a, b)};
}

TripleBasis::TripleBasis(int M) : M_(M), d3_(M * (M - 1) * (M - 2) / 6) {
  slot_.assign(static_cast<size_t>(M) * M * M, -1);
  triples_.reserve(d3_);
  int s = 0;
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b)
      for (int c = b + 1; c < M; ++c) {
        int p[3] = {a, b, c};
        do {
          slot_[(p[0] * M_ + p[1]) * M_ + p[2]] = s;
        } while (std::next_permutation(p, p + 3));
        triples_.push_back({a, b, c});
        ++s;
      }
}

double TripleBasis::phase(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0.0;
  double sign = 1.0;
  if (a > b) { std::swap(a, b); sign = -sign; }
  if (b > c) { std::swap(b, c); sign = -sign; }
  if (a > b) { std::swap(a, b); sign = -sign; }
  return sign;
}

Mat project_traceless(const Mat& A, int M) {
  Mat out = A;
  const double shift = 2.0 * tb_trace(A) / (M * (M - 1));
  out.diagonal().array() -= shift;
  return out;
}

Mat pair_embed(const Mat& m, const PairBasis& pb) {
  const int d2 = pb.size();
  Mat out = Mat::Zero(d2, d2);
  for (int p = 0; p < d2; ++p) {
    const auto [a, b] = pb.pair(p);
    for (int q = p; q < d2; ++q) {
      const auto [c, d] = pb.pair(q);
      double v = 0.0;
      if (a == c) v += m(b, d);
      if (a == d) v -= m(b, c);
      if (b == c) v -= m(a, d);
      if (b == d) v += m(a, c);
      out(p, q) = v;
      out(q, p) = v;
    }
  }
  return out;
}

Mat partial_trace(const Mat& A, const PairBasis& pb) {
  const int M = pb.orbitals();
  Mat out = Mat::Zero(M, M);
  for (int a = 0; a < M; ++a)
    for (int c = a; c < M; ++c) {
      double v = 0.0;
      for (int b = 0; b < M; ++b) {
        if (b == a || b == c) continue;
        v += PairBasis::phase(a, b) * PairBasis::phase(c, b) *
             A(pb.slot(a, b), pb.slot(c, b));
      }
      out(a, c) = v;
      out(c, a) = v;
    }
  return out;
}

}  // namespace v2dm
