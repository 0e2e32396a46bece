#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "v2dm/oracle.hpp"
#include "v2dm/solvers.hpp"

#include <Eigen/Eigenvalues>

using namespace v2dm;

namespace {

SDPProblem plain_problem(const Hamiltonian& H, int N, const std::string& conds) {
  return make_problem(H, N, ConditionSet::parse(conds), std::nullopt, false, {}, std::nullopt);
}

SolverReport run(const std::string& solver, const SDPProblem& prob, double tol,
                 bool trace = false) {
  SolverOptions opt;
  opt.tol = tol;
  opt.collect_trace = trace;
  if (solver == "dual-pr") return solve_dual_pr(prob, opt);
  if (solver == "pd-pc") return solve_pd_pc(prob, opt);
  return solve_bp(prob, opt);
}

}  // namespace

TEST_CASE("two particles are solved exactly by positivity alone") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  Mat h2 = reduced_hamiltonian(H, 2);
  Eigen::SelfAdjointEigenSolver<Mat> es(h2, Eigen::EigenvaluesOnly);
  double emin = es.eigenvalues()(0);
  CHECK(emin == doctest::Approx(-3.1231056256).epsilon(1e-9));

  SDPProblem prob = plain_problem(H, 2, "I");
  for (const char* s : {"dual-pr", "pd-pc", "bp"}) {
    SolverReport rep = run(s, prob, 1e-9);
    INFO("solver ", s);
    CHECK(rep.converged);
    CHECK(rep.energy == doctest::Approx(emin).epsilon(5e-7));
  }
}

TEST_CASE("the three solvers agree and bound the exact energy from below") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  const double exact = exact_ground(H, 3).energy;
  CHECK(exact == doctest::Approx(-1.2749172176).epsilon(1e-9));

  SDPProblem prob = plain_problem(H, 3, "I,Q,G");
  double e[3];
  int k = 0;
  for (const char* s : {"dual-pr", "pd-pc", "bp"}) {
    SolverReport rep = run(s, prob, 1e-8);
    INFO("solver ", s);
    CHECK(rep.converged);
    CHECK(rep.energy <= exact + 1e-6);
    e[k++] = rep.energy;
  }
  CHECK(std::abs(e[0] - e[1]) <= 1e-5);
  CHECK(std::abs(e[0] - e[2]) <= 1e-5);
  CHECK(std::abs(e[1] - e[2]) <= 1e-5);
}

TEST_CASE("conditions tighten the hierarchy monotonically") {
  Hamiltonian H = hubbard_1d(3, 1.0, 8.0);
  const double exact = exact_ground(H, 3).energy;
  CHECK(exact == doctest::Approx(-0.7166348019).epsilon(1e-9));

  double prev = -1e9;
  for (const char* conds : {"I,Q", "I,Q,G", "I,Q,G,T1,T2"}) {
    SolverReport rep = run("dual-pr", plain_problem(H, 3, conds), 1e-8);
    CHECK(rep.converged);
    CHECK(rep.energy >= prev - 1e-7);
    CHECK(rep.energy <= exact + 1e-6);
    prev = rep.energy;
  }
}

TEST_CASE("an active cut pins the optimum to its bound") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  const double exact = exact_ground(H, 3).energy;
  LinearInequality cut{reduced_hamiltonian(H, 3), exact};
  SDPProblem prob = make_problem(H, 3, ConditionSet::parse("I,Q,G"), std::nullopt, false,
                                 {cut}, std::nullopt);
  for (const char* s : {"dual-pr", "bp", "pd-pc"}) {
    SolverReport rep = run(s, prob, 1e-8);
    INFO("solver ", s);
    CHECK(rep.converged);
    CHECK(rep.energy == doctest::Approx(exact).epsilon(1e-6));
    CHECK(tb_inner(rep.gamma, cut.C) >= cut.c - 1e-6);
  }
}

TEST_CASE("spin equality restricts two particles to the singlet block") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  Mat h2 = reduced_hamiltonian(H, 2);
  LinearEquality s2 = spin_squared_equality(6, 2, 0.0);

  // For N = 2 the pair space is the state space, so the spin-0 optimum is the
  // smallest eigenvalue of H2 on the null space of the S^2 matrix.
  Eigen::SelfAdjointEigenSolver<Mat> es(s2.E);
  int null_dim = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < 1e-9) ++null_dim;
  Mat basis = es.eigenvectors().leftCols(null_dim);
  Eigen::SelfAdjointEigenSolver<Mat> esr(basis.transpose() * h2 * basis, Eigen::EigenvaluesOnly);
  double want = esr.eigenvalues()(0);

  SDPProblem prob = make_problem(H, 2, ConditionSet::parse("I"), 0.0, false, {}, std::nullopt);
  CHECK(prob.equality_rank == 2);
  SolverReport rep = run("dual-pr", prob, 1e-9);
  CHECK(rep.converged);
  CHECK(rep.energy == doctest::Approx(want).epsilon(1e-6));
  CHECK(tb_inner(rep.gamma, s2.E) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("singlet projection equalities keep the bound below the singlet ground state") {
  Hamiltonian H = hubbard_1d(4, 1.0, 4.0);
  const double exact = exact_ground(H, 4).energy;
  SDPProblem plain = plain_problem(H, 4, "I,Q,G");
  SDPProblem proj = make_problem(H, 4, ConditionSet::parse("I,Q,G"), 0.0, true, {},
                                 std::nullopt);
  CHECK(proj.equality_rank > plain.equality_rank);
  SolverReport rp = run("dual-pr", plain, 1e-8);
  SolverReport rs = run("dual-pr", proj, 1e-8);
  CHECK(rs.converged);
  CHECK(rs.energy >= rp.energy - 1e-7);
  CHECK(rs.energy <= exact + 1e-6);
}

TEST_CASE("the hopping floor tightens the relaxation and keeps it a bound") {
  Hamiltonian H = hubbard_1d(4, 1.0, 8.0);
  const double exact = exact_ground(H, 3).energy;
  CHECK(exact == doctest::Approx(-2.3245553203).epsilon(1e-9));

  SolverReport plain = run("dual-pr", plain_problem(H, 3, "I,Q,G"), 1e-8);
  SDPProblem prob = make_problem(H, 3, ConditionSet::parse("I,Q,G"), std::nullopt, false, {},
                                 build_nonlin_hopping(4, 1.0, 3));
  SolverReport rep = run("dual-pr", prob, 1e-8);
  CHECK(rep.converged);
  CHECK(rep.energy >= plain.energy - 1e-7);
  CHECK(rep.energy <= exact + 1e-6);

  CHECK_THROWS_AS(solve_bp(prob, SolverOptions{}), std::invalid_argument);
  CHECK_THROWS_AS(solve_pd_pc(prob, SolverOptions{}), std::invalid_argument);
}

TEST_CASE("repeated runs are deterministic") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  SDPProblem prob = plain_problem(H, 3, "I,Q,G");
  for (const char* s : {"dual-pr", "bp"}) {
    SolverReport a = run(s, prob, 1e-7);
    SolverReport b = run(s, prob, 1e-7);
    INFO("solver ", s);
    CHECK(a.energy == b.energy);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("certified bounds and trace schemas") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  SDPProblem prob = plain_problem(H, 3, "I,Q,G");
  const double exact = exact_ground(H, 3).energy;

  SolverReport bp = run("bp", prob, 1e-7, true);
  CHECK(bp.primal_bound <= exact + 1e-5);
  REQUIRE(!bp.trace.empty());
  std::vector<std::string> keys;
  for (const auto& [k, v] : bp.trace.front().cols) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"iter", "sigma", "primal_infeas", "dual_infeas",
                                         "energy"});

  SolverReport dp = run("dual-pr", prob, 1e-7, true);
  REQUIRE(!dp.trace.empty());
  keys.clear();
  for (const auto& [k, v] : dp.trace.front().cols) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"t", "newton_step", "cg_iters", "gap_estimate",
                                         "energy"});
  CHECK(dp.newton_steps > 0);

  SolverReport pc = run("pd-pc", prob, 1e-7, true);
  REQUIRE(!pc.trace.empty());
  keys.clear();
  for (const auto& [k, v] : pc.trace.front().cols) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"iter", "eta", "psi", "primal_energy",
                                         "dual_energy"});
}

TEST_CASE("returned pair matrices are symmetric with the right trace") {
  Hamiltonian H = hubbard_1d(3, 1.0, 4.0);
  SDPProblem prob = plain_problem(H, 3, "I,Q,G");
  for (const char* s : {"dual-pr", "pd-pc", "bp"}) {
    SolverReport rep = run(s, prob, 1e-7);
    INFO("solver ", s);
    CHECK((rep.gamma - rep.gamma.transpose()).norm() <= 1e-10);
    CHECK(tb_trace(rep.gamma) == doctest::Approx(3.0).epsilon(1e-7));
  }
}
