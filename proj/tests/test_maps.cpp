#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "v2dm/maps.hpp"
#include "v2dm/model.hpp"
#include "v2dm/oracle.hpp"

#include <random>

using namespace v2dm;

namespace {

Mat random_symmetric(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return 0.5 * (a + a.transpose()).eval();
}

struct GroundData {
  Spaces sp;
  Mat g2;
  Vec psi;
  FockBasis fb;
  GroundData(int L, double U, int N)
      : sp(2 * L, N), g2(), psi(), fb(2 * L, N) {
    GroundState gs = exact_ground(hubbard_1d(L, 1.0, U), N);
    psi = gs.psi;
    g2 = exact_2dm(psi, fb);
  }
};

void check_close(const Mat& got, const Mat& want, double tol = 1e-10) {
  REQUIRE(got.rows() == want.rows());
  REQUIRE(got.cols() == want.cols());
  CHECK((got - want).norm() <= tol * (1.0 + want.norm()));
}

}  // namespace

TEST_CASE("condition maps reproduce the exact operator grams") {
  for (auto [L, N] : {std::pair{3, 3}, std::pair{4, 3}}) {
    GroundData gd(L, 4.0, N);
    check_close(rho_from_gamma(gd.g2, gd.sp), exact_1dm(gd.psi, gd.fb));
    check_close(map_Q(gd.g2, gd.sp), exact_2hole(gd.psi, gd.fb));
    check_close(map_G(gd.g2, gd.sp), exact_ph_matrix(gd.psi, gd.fb));
    check_close(map_T1(gd.g2, gd.sp), exact_t1_matrix(gd.psi, gd.fb));
    check_close(map_T2(gd.g2, gd.sp), exact_t2_matrix(gd.psi, gd.fb));
    check_close(map_T2prime(gd.g2, gd.sp), exact_t2prime_matrix(gd.psi, gd.fb));
    check_close(map_gutz_rho(gd.g2, gd.sp), exact_gutz_rho(gd.psi, gd.fb));
    check_close(map_gutz_q(gd.g2, gd.sp), exact_gutz_q(gd.psi, gd.fb));
  }
}

TEST_CASE("separable piece of the particle-hole map") {
  GroundData gd(3, 4.0, 3);
  Mat rho = rho_from_gamma(gd.g2, gd.sp);
  Mat v = Eigen::Map<const Vec>(rho.data(), rho.size());
  Mat want = map_G(gd.g2, gd.sp) - v * v.transpose();
  check_close(map_G_prime(gd.g2, gd.sp), want, 1e-12);
}

TEST_CASE("maps are positive on a representable input") {
  GroundData gd(3, 8.0, 4);
  for (Cond c : {Cond::I, Cond::Q, Cond::G, Cond::T1, Cond::T2, Cond::T2P, Cond::GutzRho,
                 Cond::GutzQ}) {
    Mat m = apply_cond(c, gd.g2, gd.sp);
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-10 * (1.0 + m.norm()));
  }
}

TEST_CASE("adjoint identity for every condition map") {
  std::mt19937 rng(2024);
  for (int M : {6, 8}) {
    Spaces sp(M, 3);
    for (Cond c : {Cond::Q, Cond::G, Cond::T1, Cond::T2, Cond::T2P, Cond::GutzRho, Cond::GutzQ}) {
      int bd = cond_block_dim(c, sp.dims);
      for (int trial = 0; trial < 10; ++trial) {
        Mat g2 = random_symmetric(sp.dims.d2, rng);
        Mat a = random_symmetric(bd, rng);
        double lhs = (apply_cond(c, g2, sp).cwiseProduct(a)).sum();
        double rhs = tb_inner(g2, adj_cond(c, a, sp));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("adjoint outputs are symmetric") {
  std::mt19937 rng(77);
  Spaces sp(6, 3);
  for (Cond c : {Cond::Q, Cond::G, Cond::T1, Cond::T2, Cond::T2P, Cond::GutzRho, Cond::GutzQ}) {
    Mat a = random_symmetric(cond_block_dim(c, sp.dims), rng);
    Mat t = adj_cond(c, a, sp);
    CHECK((t - t.transpose()).norm() <= 1e-12 * (1.0 + t.norm()));
  }
}

TEST_CASE("carrier assembly matches per-condition application") {
  std::mt19937 rng(5);
  Spaces sp(6, 3);
  ConditionSet cs = ConditionSet::parse("I,Q,G,T1,T2");
  Mat g2 = random_symmetric(sp.dims.d2, rng);
  Carrier car = apply_conditions(g2, cs, sp);
  REQUIRE(car.blocks.size() == 5);
  CHECK(car.ineq.size() == 0);
  for (const auto& [c, block] : car.blocks) check_close(block, apply_cond(c, g2, sp), 1e-13);
}

TEST_CASE("collapse is the adjoint of the block assembly") {
  std::mt19937 rng(6);
  Spaces sp(6, 3);
  ConditionSet cs = ConditionSet::parse("I,Q,G,T1,T2P,GUTZ");
  // Two inequality directions exercise the linear entries as well.
  std::vector<Mat> c0 = {random_symmetric(sp.dims.d2, rng), random_symmetric(sp.dims.d2, rng)};
  for (int trial = 0; trial < 10; ++trial) {
    Mat g2 = random_symmetric(sp.dims.d2, rng);
    Carrier a = Carrier::zero(cs, sp.dims, 2);
    for (auto& [c, block] : a.blocks) block = random_symmetric(block.rows(), rng);
    a.ineq = Vec::Random(2);
    double lhs = carrier_inner(apply_conditions(g2, cs, sp, &c0), a);
    double rhs = tb_inner(g2, collapse(a, sp, &c0));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("condition set parsing") {
  ConditionSet cs = ConditionSet::parse("I,Q,G");
  CHECK(cs.conds().size() == 3);
  CHECK(cs.has(Cond::Q));
  CHECK(!cs.has(Cond::T2));
  CHECK(ConditionSet::parse("Q").has(Cond::I));  // identity is implied
  CHECK(ConditionSet::parse("GUTZ").has_gutzwiller());
  CHECK(ConditionSet::parse("I,Q,G,T1,T2P").has(Cond::T2P));
  CHECK_THROWS_AS(ConditionSet::parse("I,XYZ"), std::invalid_argument);
  CHECK_THROWS_AS(ConditionSet::parse("T2,T2P"), std::invalid_argument);
  CHECK(cond_name(Cond::T2P) == "T2P");
}

TEST_CASE("block dimensions") {
  BasisDims d = basis_dims(12, 5);
  CHECK(cond_block_dim(Cond::I, d) == 66);
  CHECK(cond_block_dim(Cond::Q, d) == 66);
  CHECK(cond_block_dim(Cond::G, d) == 144);
  CHECK(cond_block_dim(Cond::T1, d) == 220);
  CHECK(cond_block_dim(Cond::T2, d) == 792);
  CHECK(cond_block_dim(Cond::T2P, d) == 792 + 12);
  CHECK(cond_block_dim(Cond::GutzRho, d) == 12);
  CHECK(cond_block_dim(Cond::GutzQ, d) == 12);
}

TEST_CASE("carrier arithmetic") {
  std::mt19937 rng(9);
  Spaces sp(6, 3);
  ConditionSet cs = ConditionSet::parse("I,Q");
  Carrier a = Carrier::zero(cs, sp.dims, 1);
  Carrier b = Carrier::zero(cs, sp.dims, 1);
  for (auto& [c, blk] : a.blocks) blk = random_symmetric(blk.rows(), rng);
  for (auto& [c, blk] : b.blocks) blk = random_symmetric(blk.rows(), rng);
  a.ineq << 2.0;
  b.ineq << -3.0;
  CHECK(a.total_dim() == 15 + 15 + 1);

  double inner = carrier_inner(a, b);
  double byhand = a.ineq(0) * b.ineq(0);
  for (std::size_t k = 0; k < a.blocks.size(); ++k)
    byhand += (a.blocks[k].second.cwiseProduct(b.blocks[k].second)).sum();
  CHECK(inner == doctest::Approx(byhand).epsilon(1e-13));

  Carrier s = a;
  s += b;
  s *= 2.0;
  CHECK(carrier_inner(s, s) ==
        doctest::Approx(4 * (carrier_inner(a, a) + 2 * inner + carrier_inner(b, b)))
            .epsilon(1e-12));
  CHECK(carrier_norm(a) == doctest::Approx(std::sqrt(carrier_inner(a, a))).epsilon(1e-13));
  double tr = a.ineq.sum();
  for (auto& [c, blk] : a.blocks) tr += blk.trace();
  CHECK(carrier_trace(a) == doctest::Approx(tr).epsilon(1e-13));
}
