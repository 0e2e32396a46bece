#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "v2dm/maps.hpp"
#include "v2dm/model.hpp"
#include "v2dm/oracle.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace v2dm;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("hubbard chain layout") {
  Hamiltonian H = hubbard_1d(4, 1.0, 3.0);
  CHECK(H.M == 8);
  CHECK((H.t - H.t.transpose()).norm() == 0.0);
  // Nearest-neighbour hopping connects same-spin orbitals only.
  CHECK(H.t(0, 2) == doctest::Approx(-1.0));
  CHECK(H.t(1, 3) == doctest::Approx(-1.0));
  CHECK(H.t(6, 0) == doctest::Approx(-1.0));
  CHECK(H.t(0, 1) == 0.0);
  CHECK(H.t(0, 0) == 0.0);
  // Repulsion sits on the on-site up/down pair slots.
  PairBasis pb(8);
  for (int i = 0; i < 4; ++i)
    CHECK(H.V(pb.slot(2 * i, 2 * i + 1), pb.slot(2 * i, 2 * i + 1)) == doctest::Approx(3.0));
  CHECK(H.V.diagonal().sum() == doctest::Approx(12.0));
  CHECK(H.V.norm() == doctest::Approx(6.0));  // nothing off the four slots
}

TEST_CASE("two-site chain at U=0 binds two particles at -4t") {
  // Periodic two-site chain doubles the single bond, so the band is +-2t.
  GroundState gs = exact_ground(hubbard_1d(2, 1.0, 0.0), 2);
  CHECK(gs.energy == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("reduced hamiltonian reproduces expectation values") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  int N = 3;
  GroundState gs = exact_ground(H, N);
  FockBasis fb(H.M, N);
  Mat g2 = exact_2dm(gs.psi, fb);
  Mat rho = exact_1dm(gs.psi, fb);

  Mat h2 = reduced_hamiltonian(H, N);
  CHECK(tb_inner(g2, h2) == doctest::Approx(gs.energy).epsilon(1e-12));
  double split = (H.t.cwiseProduct(rho)).sum() + tb_inner(g2, H.V);
  CHECK(split == doctest::Approx(gs.energy).epsilon(1e-12));
}

TEST_CASE("pairing hamiltonian single level") {
  Vec eps = Vec::Zero(1), x(1);
  x << 1.3;
  Hamiltonian H = pairing_hamiltonian(eps, 0.7, x);
  CHECK(H.M == 2);
  CHECK(exact_ground(H, 2).energy == doctest::Approx(-2.0 * 0.7 * 1.3 * 1.3).epsilon(1e-12));
}

TEST_CASE("pairing level energies enter the diagonal") {
  Vec eps(2), x(2);
  eps << -0.5, 0.75;
  x << 1.0, 1.0;
  Hamiltonian H = pairing_hamiltonian(eps, 0.0, x);
  // Without interaction the ground state stacks the lowest level.
  CHECK(exact_ground(H, 2).energy == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("problem file round trip") {
  Hamiltonian H = hubbard_1d(4, 1.0, 2.5);
  std::string path = temp_path("v2dm_problem_roundtrip.txt");
  save_problem(path, H, 3);
  auto [G, n] = load_problem(path);
  CHECK(n == 3);
  CHECK(G.M == H.M);
  CHECK((G.t - H.t).norm() == 0.0);
  CHECK((G.V - H.V).norm() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("two-body matrix dump format") {
  PairBasis pb(4);
  Mat A = Mat::Zero(pb.size(), pb.size());
  A(0, 1) = A(1, 0) = 0.125;
  A(5, 5) = -3.0;
  std::string path = temp_path("v2dm_two_body_dump.txt");
  save_two_body(path, A, 4, 2);
  std::ifstream in(path);
  int M, N, d2;
  in >> M >> N >> d2;
  CHECK(M == 4);
  CHECK(N == 2);
  CHECK(d2 == 6);
  Mat B(d2, d2);
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < d2; ++j) in >> B(i, j);
  CHECK(bool(in));
  CHECK((A - B).norm() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("subsystem restriction and masked pieces") {
  Hamiltonian H = hubbard_1d(4, 1.0, 8.0);
  std::vector<int> frag = {0, 1, 2, 3};  // first two sites
  SubsystemSpec spec = make_subsystem_spec(H, frag);
  CHECK(spec.M == 8);
  CHECK(spec.orbitals == frag);
  // The masked one-body part keeps only intra-fragment elements.
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      bool ina = a < 4 && b < 4;
      if (!ina) CHECK(spec.tV(a, b) == 0.0);
    }
  CHECK(spec.tV(0, 2) == doctest::Approx(-1.0));

  Hamiltonian sub = restrict_to(H, frag);
  CHECK(sub.M == 4);
  CHECK(sub.t(0, 2) == doctest::Approx(-1.0));
  PairBasis pbs(4);
  CHECK(sub.V(pbs.slot(0, 1), pbs.slot(0, 1)) == doctest::Approx(8.0));

  // Masked expectation equals the restricted expectation on product states.
  EnergyCurve curve = energy_vs_N(sub, 0, 4);
  CHECK(curve.n.size() == 5);
  CHECK(curve.energy[0] == doctest::Approx(0.0));
  CHECK(!curve.hull.empty());
  CHECK(curve.hull.front() == 0);
  CHECK(curve.hull.back() == int(curve.n.size()) - 1);
}

TEST_CASE("subsystem inequalities hold on the exact state") {
  // Fragment = sites 0,1 of a four-site chain; chords of the fragment energy
  // envelope must not cut off the exact ground-state 2DM.
  Hamiltonian H = hubbard_1d(4, 1.0, 8.0);
  int N = 3;
  std::vector<int> frag = {0, 1, 2, 3};
  SubsystemSpec spec = make_subsystem_spec(H, frag);
  Hamiltonian sub = restrict_to(H, frag);
  EnergyCurve curve = energy_vs_N(sub, 0, 4);
  for (int i : curve.hull) spec.table.emplace_back(curve.n[i], curve.energy[i]);

  std::vector<LinearInequality> cuts = subsystem_inequalities(spec, N);
  CHECK(!cuts.empty());
  GroundState gs = exact_ground(H, N);
  FockBasis fb(H.M, N);
  Mat g2 = exact_2dm(gs.psi, fb);
  for (const LinearInequality& c : cuts) CHECK(tb_inner(g2, c.C) >= c.c - 1e-9);
}

TEST_CASE("non-convex subsystem tables are rejected") {
  Hamiltonian H = hubbard_1d(4, 1.0, 8.0);
  SubsystemSpec spec = make_subsystem_spec(H, {0, 1, 2, 3});
  spec.table = {{0, 0.0}, {1, -5.0}, {2, -6.0}, {3, -20.0}};  // kink at n=2
  CHECK_THROWS_AS(subsystem_inequalities(spec, 3), std::invalid_argument);
}
