#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "v2dm/maps.hpp"
#include "v2dm/oracle.hpp"
#include "v2dm/sharp.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace v2dm;

namespace {

Mat random_skew(int m, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = g(rng);
  return 0.5 * (b - b.transpose()).eval();
}

Vec random_state(const FockBasis& fb, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Vec psi(fb.dim());
  for (int i = 0; i < fb.dim(); ++i) psi[i] = g(rng);
  return psi.normalized();
}

}  // namespace

TEST_CASE("canonical form reconstructs the pair amplitude") {
  std::mt19937 rng(101);
  for (int m : {4, 6, 8}) {
    Mat b = random_skew(m, rng);
    CanonicalPairs cp = canonical_pairing_form(b);
    CHECK((cp.U * cp.U.transpose() - Mat::Identity(m, m)).norm() <= 1e-11);
    REQUIRE(cp.x.size() == m / 2);
    for (int k = 0; k < cp.x.size(); ++k) {
      CHECK(cp.x(k) >= -1e-14);
      if (k) CHECK(cp.x(k) <= cp.x(k - 1) + 1e-12);
    }
    Mat block = Mat::Zero(m, m);
    for (int k = 0; k < m / 2; ++k) {
      block(2 * k, 2 * k + 1) = cp.x(k) / std::sqrt(2.0);
      block(2 * k + 1, 2 * k) = -cp.x(k) / std::sqrt(2.0);
    }
    CHECK((cp.U.transpose() * block * cp.U - b).norm() <= 1e-11 * (1.0 + b.norm()));
    CHECK(cp.x.squaredNorm() == doctest::Approx(b.squaredNorm()).epsilon(1e-11));
  }
}

TEST_CASE("pair spectrum matches the sector diagonalization") {
  std::mt19937 rng(55);
  for (auto [m, n] : {std::pair{6, 2}, std::pair{6, 3}, std::pair{6, 4}, std::pair{8, 2},
                      std::pair{8, 3}, std::pair{8, 4}, std::pair{8, 5}}) {
    Mat b = random_skew(m, rng);
    CanonicalPairs cp = canonical_pairing_form(b);
    double want = pair_op_max_eig(b, n);
    double got = richardson_lambda_max(cp.x, n);
    INFO("m ", m, " n ", n);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("uniform amplitudes saturate the closed-form maximum") {
  for (auto [m, pairs, want] :
       {std::tuple{8, 2, 6.0}, std::tuple{12, 3, 8.0}, std::tuple{6, 2, 16.0 / 3.0}}) {
    Vec x = Vec::Constant(m / 2, std::sqrt(4.0 / m));
    CHECK(richardson_lambda_max(x, 2 * pairs) == doctest::Approx(want).epsilon(1e-10));
  }
  // Odd particle numbers block one level.
  Vec x = Vec::Constant(4, std::sqrt(0.5));
  CHECK(richardson_lambda_max(x, 3) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(richardson_lambda_max(x, 5) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("rapidities exist exactly for two or more pairs") {
  Vec x(4);
  x << 1.3, 1.1, 0.7, 0.2;
  CHECK(richardson_rapidities(x, 1).size() == 0);
  Vec r2 = richardson_rapidities(x, 2);
  CHECK(r2.size() == 2);
  Vec r3 = richardson_rapidities(x, 3);
  CHECK(r3.size() == 3);
}

TEST_CASE("amplitude gradient of the maximal eigenvalue") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.4, 1.6);
  for (int n : {2, 3, 4}) {
    Vec x(4);
    for (int k = 0; k < 4; ++k) x(k) = unif(rng);
    std::sort(x.data(), x.data() + 4, std::greater<double>());
    Vec grad = dlambda_dx(x, n);
    const double h = 1e-5;
    for (int k = 0; k < 4; ++k) {
      Vec xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      double fd = (richardson_lambda_max(xp, n) - richardson_lambda_max(xm, n)) / (2 * h);
      INFO("n ", n, " k ", k);
      CHECK(grad(k) == doctest::Approx(fd).epsilon(2e-5));
    }
  }
}

TEST_CASE("the lifted pair matrix reproduces operator expectations") {
  std::mt19937 rng(23);
  Spaces sp(6, 3);
  FockBasis fb(6, 3);
  FockBasis fb1(6, 1);
  for (int trial = 0; trial < 5; ++trial) {
    Mat b = random_skew(6, rng);
    Vec psi = random_state(fb, rng);
    // <B+ B> = |B psi|^2 with B = sum_ab B_ab a_b a_a.
    Vec bpsi = Vec::Zero(fb1.dim());
    for (int a = 0; a < 6; ++a)
      for (int c = 0; c < 6; ++c)
        if (a != c)
          bpsi += b(a, c) * apply_op_string(psi, {{c, false}, {a, false}}, fb, fb1);
    double want = bpsi.squaredNorm();
    Mat g2 = exact_2dm(psi, fb);
    CHECK(tb_inner(g2, pair_operator_lift(b, sp.pb)) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("representable matrices admit no pair-bound violation") {
  std::mt19937 rng(3);
  Spaces sp(6, 3);
  GroundState gs = exact_ground(hubbard_1d(3, 1.0, 8.0), 3);
  Mat g2 = exact_2dm(gs.psi, FockBasis(6, 3));
  for (int trial = 0; trial < 10; ++trial) {
    Mat b = random_skew(6, rng);
    CHECK(sharp_violation_I(b, g2, sp) >= -1e-9);
    CHECK(sharp_violation_Q(b, g2, sp) >= -1e-9);
  }
  SharpSearchResult ri = sharp_search_I(g2, sp, 3, 11);
  CHECK(ri.violation >= -1e-9);
  SharpSearchResult rq = sharp_search_Q(g2, sp, 3, 11);
  CHECK(rq.violation >= -1e-9);
}

TEST_CASE("emitted inequalities hold on the exact state") {
  std::mt19937 rng(9);
  Spaces sp(6, 3);
  GroundState gs = exact_ground(hubbard_1d(3, 1.0, 4.0), 3);
  Mat g2 = exact_2dm(gs.psi, FockBasis(6, 3));
  for (int trial = 0; trial < 5; ++trial) {
    Mat b = random_skew(6, rng);
    for (bool two_hole : {false, true}) {
      LinearInequality iq = emit_sharp_inequality(b, sp, two_hole);
      CHECK(tb_inner(g2, iq.C) >= iq.c - 1e-9);
    }
  }
}

TEST_CASE("searches are deterministic under a fixed seed") {
  Spaces sp(6, 3);
  GroundState gs = exact_ground(hubbard_1d(3, 1.0, 8.0), 3);
  Mat g2 = exact_2dm(gs.psi, FockBasis(6, 3));
  SharpSearchResult a = sharp_search_I(g2, sp, 2, 42);
  SharpSearchResult b = sharp_search_I(g2, sp, 2, 42);
  CHECK(a.violation == b.violation);
  CHECK((a.B - b.B).norm() == 0.0);
}

TEST_CASE("number-conserving squared bounds against brute force") {
  std::mt19937 rng(71);
  for (int trial = 0; trial < 3; ++trial) {
    Mat b = random_skew(6, rng);
    b = (b * b.transpose()).eval();  // generic symmetric
    auto [emax, emin] = sharp_G_bounds(b, 3);

    Hamiltonian hb(6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (b(i, j) != 0.0) hb.add_one_body(i, j, b(i, j));
    FockBasis fb(6, 3);
    Mat mb = build_dense_hamiltonian(hb, fb);
    Eigen::SelfAdjointEigenSolver<Mat> es(mb, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    double want_max = std::max(lo * lo, hi * hi);
    double want_min = 1e300;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      want_min = std::min(want_min, es.eigenvalues()(i) * es.eigenvalues()(i));
    CHECK(emax == doctest::Approx(want_max).epsilon(1e-9));
    CHECK(emin == doctest::Approx(want_min).epsilon(1e-9));
  }
  Mat ns = Mat::Zero(6, 6);
  ns(0, 1) = 1.0;
  CHECK_THROWS_AS(sharp_G_bounds(ns, 3), std::invalid_argument);
}
