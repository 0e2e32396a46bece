#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "v2dm/constraints.hpp"
#include "v2dm/maps.hpp"
#include "v2dm/model.hpp"
#include "v2dm/oracle.hpp"

#include <random>

using namespace v2dm;

namespace {

Vec random_state(const FockBasis& fb, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Vec psi(fb.dim());
  for (int i = 0; i < fb.dim(); ++i) psi[i] = g(rng);
  return psi.normalized();
}

}  // namespace

TEST_CASE("homogenized inequalities shift by the bound on the normalized set") {
  std::mt19937 rng(31);
  int M = 8, N = 3;
  FockBasis fb(M, N);
  Mat g2 = exact_2dm(random_state(fb, rng), fb);
  LinearInequality iq;
  iq.C = Mat::Random(28, 28);
  iq.C = (0.5 * (iq.C + iq.C.transpose())).eval();
  iq.c = 1.7;
  Mat c0 = homogenize_inequality(iq, M, N);
  CHECK(tb_inner(g2, c0) == doctest::Approx(tb_inner(g2, iq.C) - iq.c).epsilon(1e-12));
  LinearInequality bad;
  bad.C = Mat::Zero(5, 5);
  bad.c = 0.0;
  CHECK_THROWS_AS(homogenize_inequality(bad, M, N), std::invalid_argument);
}

TEST_CASE("total-spin equality reproduces the expectation on arbitrary states") {
  std::mt19937 rng(17);
  for (auto [M, N] : {std::pair{6, 3}, std::pair{8, 4}}) {
    LinearEquality eq = spin_squared_equality(M, N, 0.5);
    CHECK(eq.e == doctest::Approx(0.75));
    FockBasis fb(M, N);
    for (int trial = 0; trial < 5; ++trial) {
      Vec psi = random_state(fb, rng);
      Mat g2 = exact_2dm(psi, fb);
      CHECK(tb_inner(g2, eq.E) ==
            doctest::Approx(exact_spin_squared(psi, fb)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(spin_squared_equality(7, 3, 0.5), std::invalid_argument);
}

TEST_CASE("spin eigenstates hit the eigenvalue exactly") {
  // L=4 half filling: singlet ground state.  L=3 N=3: spin-1/2 ground state.
  {
    GroundState gs = exact_ground(hubbard_1d(4, 1.0, 4.0), 4);
    FockBasis fb(8, 4);
    CHECK(exact_spin_squared(gs.psi, fb) == doctest::Approx(0.0).epsilon(1e-9));
  }
  {
    GroundState gs = exact_ground(hubbard_1d(3, 1.0, 4.0), 3);
    FockBasis fb(6, 3);
    CHECK(exact_spin_squared(gs.psi, fb) == doctest::Approx(0.75).epsilon(1e-9));
  }
}

TEST_CASE("singlet projection equalities vanish on a singlet and not on a triplet") {
  GroundState gs = exact_ground(hubbard_1d(4, 1.0, 4.0), 4);
  FockBasis fb(8, 4);
  Mat g2 = exact_2dm(gs.psi, fb);
  auto eqs = singlet_projection_equalities(8, 4);
  CHECK(eqs.size() == 64);
  double worst = 0.0;
  for (const auto& eq : eqs) {
    CHECK(eq.e == 0.0);
    worst = std::max(worst, std::abs(tb_inner(g2, eq.E)));
  }
  CHECK(worst <= 1e-9);

  // Both spins up on neighbouring sites: S = 1, the conditions must bite.
  FockBasis fb2(6, 2);
  Vec psi = Vec::Zero(fb2.dim());
  psi[fb2.index((1ull << 0) | (1ull << 2))] = 1.0;
  Mat t2 = exact_2dm(psi, fb2);
  double worst2 = 0.0;
  for (const auto& eq : singlet_projection_equalities(6, 2))
    worst2 = std::max(worst2, std::abs(tb_inner(t2, eq.E)));
  CHECK(worst2 > 1e-3);
}

TEST_CASE("hopping floor endpoints and branch point") {
  NonlinHopping nl = build_nonlin_hopping(6, 1.0, 5);
  CHECK(nl.T0 == doctest::Approx(-7.0).epsilon(1e-12));
  CHECK(nl.Tinf == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(nl.p_branch == doctest::Approx(25.0 / 221.0).epsilon(1e-12));
  NonlinHopping nl43 = build_nonlin_hopping(4, 1.0, 3);
  CHECK(nl43.T0 == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(nl43.Tinf == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(nl43.p_branch == doctest::Approx(1.0 / 17.0).epsilon(1e-12));
}

TEST_CASE("hopping floor carrier matrices measure what they claim") {
  NonlinHopping nl = build_nonlin_hopping(4, 1.0, 3);
  Hamiltonian H = hubbard_1d(4, 1.0, 6.0);
  GroundState gs = exact_ground(H, 3);
  FockBasis fb(8, 3);
  Mat g2 = exact_2dm(gs.psi, fb);
  Mat rho = exact_1dm(gs.psi, fb);

  // <Gamma, T> is the kinetic energy.
  CHECK(tb_inner(g2, nl.T) == doctest::Approx((H.t * rho).trace()).epsilon(1e-10));

  // <Gamma, P> counts doubly occupied sites.
  double docc = 0.0;
  for (int i = 0; i < 4; ++i)
    docc += expectation(gs.psi,
                        {{2 * i, true}, {2 * i + 1, true}, {2 * i + 1, false}, {2 * i, false}},
                        fb);
  CHECK(tb_inner(g2, nl.P) == doctest::Approx(docc).epsilon(1e-10));
}

TEST_CASE("envelope, slope and curvature are mutually consistent") {
  NonlinHopping nl = build_nonlin_hopping(6, 1.0, 5);
  CHECK(nonlin_f_star(nl, 0.0) == doctest::Approx(nl.Tinf).epsilon(1e-12));
  CHECK(nonlin_f_star(nl, nl.p_branch * (1.0 - 1e-12)) ==
        doctest::Approx(nl.T0).epsilon(1e-9));
  const double eps = 1e-6;
  for (double p : {0.02, 0.05, 0.08, 0.10}) {
    double fd_g = (nonlin_f_star(nl, p + eps) - nonlin_f_star(nl, p - eps)) / (2 * eps);
    double fd_h = (nonlin_g(nl, p + eps) - nonlin_g(nl, p - eps)) / (2 * eps);
    CHECK(nonlin_g(nl, p) == doctest::Approx(fd_g).epsilon(1e-6));
    CHECK(nonlin_h(nl, p) == doctest::Approx(fd_h).epsilon(1e-6));
  }
  for (double p : {0.2, 0.5, 0.9}) {
    CHECK(nonlin_f_star(nl, p) == nl.T0);
    CHECK(nonlin_g(nl, p) == 0.0);
    CHECK(nonlin_h(nl, p) == 0.0);
  }
  CHECK_THROWS_AS(nonlin_f_star(nl, -0.1), std::domain_error);
  CHECK_THROWS_AS(nonlin_f_star(nl, 1.1), std::domain_error);
}

TEST_CASE("envelope lies below the exact kinetic energy") {
  for (auto [L, N] : {std::pair{4, 3}, std::pair{3, 3}}) {
    NonlinHopping nl = build_nonlin_hopping(L, 1.0, N);
    FockBasis fb(2 * L, N);
    for (double U : {0.0, 1.0, 8.0, 100.0}) {
      GroundState gs = exact_ground(hubbard_1d(L, 1.0, U), N);
      Mat g2 = exact_2dm(gs.psi, fb);
      double p = tb_inner(g2, nl.P);
      double kin = tb_inner(g2, nl.T);
      CHECK(kin >= nonlin_f_star(nl, std::clamp(p, 0.0, 1.0)) - 1e-9);
    }
  }
}
