#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "v2dm/basis.hpp"

#include <random>
#include <stdexcept>

using namespace v2dm;

namespace {

Mat random_symmetric(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return 0.5 * (a + a.transpose()).eval();
}

/// Full four-index antisymmetric extension A_{ab;cd} of an ordered-slot matrix.
double four_index(const Mat& a, const PairBasis& pb, int i, int j, int k, int l) {
  if (i == j || k == l) return 0.0;
  auto [p, sp] = pair_index(pb, i, j);
  auto [q, sq] = pair_index(pb, k, l);
  return sp * sq * a(p, q);
}

}  // namespace

TEST_CASE("basis dimensions") {
  BasisDims d = basis_dims(12, 5);
  CHECK(d.d2 == 66);
  CHECK(d.d3 == 220);
  CHECK(d.dph == 144);
  CHECK(d.dpph == 792);
  CHECK_THROWS_AS(basis_dims(6, 1), std::invalid_argument);
  CHECK_THROWS_AS(basis_dims(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(basis_dims(2, 2), std::invalid_argument);
}

TEST_CASE("pair basis enumeration") {
  PairBasis pb(6);
  CHECK(pb.size() == 15);
  int s = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b) {
      CHECK(pb.slot(a, b) == s);
      CHECK(pb.pair(s).first == a);
      CHECK(pb.pair(s).second == b);
      ++s;
    }
  CHECK(pair_index(pb, 1, 4).first == pb.slot(1, 4));
  CHECK(pair_index(pb, 1, 4).second == 1.0);
  CHECK(pair_index(pb, 4, 1).first == pb.slot(1, 4));
  CHECK(pair_index(pb, 4, 1).second == -1.0);
  CHECK_THROWS_AS(pair_index(pb, 3, 3), std::domain_error);
  CHECK_THROWS_AS(pair_index(pb, 0, 6), std::domain_error);
}

TEST_CASE("triple basis enumeration") {
  TripleBasis tb(6);
  CHECK(tb.size() == 20);
  int s = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (int c = b + 1; c < 6; ++c) {
        CHECK(tb.slot(a, b, c) == s);
        CHECK(tb.slot(c, a, b) == s);
        CHECK(tb.triple(s)[0] == a);
        CHECK(tb.triple(s)[2] == c);
        ++s;
      }
  CHECK(TripleBasis::phase(0, 1, 2) == 1.0);
  CHECK(TripleBasis::phase(1, 0, 2) == -1.0);
  CHECK(TripleBasis::phase(2, 0, 1) == 1.0);
  CHECK(TripleBasis::phase(1, 1, 2) == 0.0);
}

TEST_CASE("ordered-slot trace and inner product") {
  std::mt19937 rng(7);
  PairBasis pb(5);
  Mat a = random_symmetric(pb.size(), rng);
  Mat b = random_symmetric(pb.size(), rng);
  double tr = 0.0, inner = 0.0;
  for (int s = 0; s < pb.size(); ++s) {
    tr += a(s, s);
    for (int q = 0; q < pb.size(); ++q) inner += a(s, q) * b(s, q);
  }
  CHECK(tb_trace(a) == doctest::Approx(tr).epsilon(1e-14));
  CHECK(tb_inner(a, b) == doctest::Approx(inner).epsilon(1e-14));
}

TEST_CASE("traceless projection") {
  std::mt19937 rng(11);
  int M = 6;
  PairBasis pb(M);
  Mat a = random_symmetric(pb.size(), rng);
  Mat p = project_traceless(a, M);
  CHECK(std::abs(tb_trace(p)) < 1e-12 * a.norm());
  CHECK((project_traceless(p, M) - p).norm() < 1e-12 * a.norm());
  // Removes exactly the identity component.
  CHECK((a - p - (2.0 * tb_trace(a) / (M * (M - 1))) * Mat::Identity(pb.size(), pb.size())).norm() <
        1e-12 * a.norm());
}

TEST_CASE("pair embedding against the four-index formula") {
  std::mt19937 rng(23);
  int M = 5;
  PairBasis pb(M);
  Mat m = random_symmetric(M, rng);
  Mat d = pair_embed(m, pb);
  for (int p = 0; p < pb.size(); ++p) {
    auto [a, b] = pb.pair(p);
    for (int q = 0; q < pb.size(); ++q) {
      auto [c, e] = pb.pair(q);
      double want = (a == c ? m(b, e) : 0.0) - (a == e ? m(b, c) : 0.0) -
                    (b == c ? m(a, e) : 0.0) + (b == e ? m(a, c) : 0.0);
      CHECK(d(p, q) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  CHECK((pair_embed(Mat::Identity(M, M), pb) - 2.0 * Mat::Identity(pb.size(), pb.size())).norm() <
        1e-13);
}

TEST_CASE("partial trace against the four-index formula") {
  std::mt19937 rng(31);
  int M = 5;
  PairBasis pb(M);
  Mat a = random_symmetric(pb.size(), rng);
  Mat bar = partial_trace(a, pb);
  for (int i = 0; i < M; ++i)
    for (int k = 0; k < M; ++k) {
      double want = 0.0;
      for (int b = 0; b < M; ++b) want += four_index(a, pb, i, b, k, b);
      CHECK(bar(i, k) == doctest::Approx(want).epsilon(1e-13));
    }
  CHECK(bar.trace() == doctest::Approx(2.0 * tb_trace(a)).epsilon(1e-13));
}

TEST_CASE("pair embedding and partial trace are mutually adjoint") {
  std::mt19937 rng(43);
  int M = 6;
  PairBasis pb(M);
  for (int trial = 0; trial < 20; ++trial) {
    Mat m = random_symmetric(M, rng);
    Mat a = random_symmetric(pb.size(), rng);
    double lhs = tb_inner(pair_embed(m, pb), a);
    double rhs = (m.cwiseProduct(partial_trace(a, pb))).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("partial trace of an embedding") {
  std::mt19937 rng(57);
  int M = 7;
  PairBasis pb(M);
  Mat m = random_symmetric(M, rng);
  Mat got = partial_trace(pair_embed(m, pb), pb);
  Mat want = (M - 2) * m + m.trace() * Mat::Identity(M, M);
  CHECK((got - want).norm() < 1e-12 * want.norm());
}
