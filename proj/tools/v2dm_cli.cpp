#include "v2dm/model.hpp"
#include "v2dm/observables.hpp"
#include "v2dm/oracle.hpp"
#include "v2dm/problem.hpp"
#include "v2dm/report.hpp"
#include "v2dm/sharp.hpp"
#include "v2dm/solvers.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace v2dm;

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

/**
 * Subsystem file: a line "orbitals a b c ..." naming the fragment, then
 * optional "E n value" rows for the energy table.  Without explicit rows the
 * table is computed exactly from the restricted Hamiltonian and reduced to
 * the vertices of its lower convex envelope.
 */
SubsystemSpec load_subsystem(const std::string& path, const Hamiltonian& H) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--subsystem", "cannot open " + path);
  std::vector<int> orbitals;
  std::vector<std::pair<int, double>> table;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::stringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "orbitals") {
      int o;
      while (ss >> o) orbitals.push_back(o);
    } else if (key == "E") {
      int n;
      double e;
      if (!(ss >> n >> e)) throw CLI::ValidationError("--subsystem", "bad E row");
      table.emplace_back(n, e);
    } else {
      throw CLI::ValidationError("--subsystem", "unknown key '" + key + "'");
    }
  }
  if (orbitals.empty()) throw CLI::ValidationError("--subsystem", "no orbitals line");

  SubsystemSpec spec = make_subsystem_spec(H, orbitals);
  if (!table.empty()) {
    spec.table = table;
  } else {
    Hamiltonian sub = restrict_to(H, orbitals);
    EnergyCurve curve = energy_vs_N(sub, 0, sub.M);
    for (int i : curve.hull) spec.table.emplace_back(curve.n[i], curve.energy[i]);
  }
  return spec;
}

struct RunSettings {
  std::string solver = "dual-pr";
  SolverOptions opt;
  int sharp_rounds = 0;
  bool oracle = false;
  std::string trace_path;
};

/// One complete solve, including optional sharpening rounds and the exact
/// benchmark, serialized to a JSON report.
std::string run_once(const Hamiltonian& H, int N, const ConditionSet& cs,
                     std::optional<double> spin, bool singlet_projection,
                     std::vector<LinearInequality> extra_ineq,
                     std::optional<NonlinHopping> nonlin, const ModelInfo& minfo,
                     const RunSettings& rs, bool& solver_failed) {
  auto t0 = std::chrono::steady_clock::now();

  SolverReport rep;
  SDPProblem prob = make_problem(H, N, cs, spin, singlet_projection, extra_ineq, nonlin);
  auto solve = [&](const SDPProblem& p) {
    if (rs.solver == "dual-pr") return solve_dual_pr(p, rs.opt);
    if (rs.solver == "pd-pc") return solve_pd_pc(p, rs.opt);
    return solve_bp(p, rs.opt);
  };
  rep = solve(prob);

  // Sharpening: search for violated exact pair bounds on the relaxed 2DM,
  // append them as cuts and re-solve.
  for (int round = 0; round < rs.sharp_rounds && rep.converged; ++round) {
    SharpSearchResult si = sharp_search_I(rep.gamma, prob.sp, 20, rs.opt.seed + round);
    SharpSearchResult sq = sharp_search_Q(rep.gamma, prob.sp, 20, rs.opt.seed + round + 101);
    bool added = false;
    if (si.violation < -1e-8) {
      extra_ineq.push_back(emit_sharp_inequality(si.B, prob.sp, false));
      added = true;
    }
    if (sq.violation < -1e-8) {
      extra_ineq.push_back(emit_sharp_inequality(sq.B, prob.sp, true));
      added = true;
    }
    if (!added) break;
    prob = make_problem(H, N, cs, spin, singlet_projection, extra_ineq, nonlin);
    rep = solve(prob);
  }

  double exact = 0.0;
  if (rs.oracle) exact = exact_ground(H, N).energy;

  auto t1 = std::chrono::steady_clock::now();
  double seconds = std::chrono::duration<double>(t1 - t0).count();

  int proj_rank = -1;
  if (singlet_projection)
    proj_rank = prob.equality_rank - 1 - (spin ? 1 : 0);

  if (!rs.trace_path.empty()) write_trace_csv(rs.trace_path, rep.trace);
  solver_failed = !rep.converged;
  return report_json(rep, prob, minfo, rs.solver, seconds, proj_rank, exact, rs.oracle);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational two-particle density matrix solver"};

  std::string model = "hubbard";
  int sites = 6;
  int particles = 5;
  double hop_t = 1.0;
  double hub_u = 0.0;
  std::string conditions = "I,Q,G";
  std::string solver = "dual-pr";
  std::optional<double> spin;
  bool singlet_projection = false;
  bool nonlin_hopping = false;
  std::string subsystem_path;
  int sharp_rounds = 0;
  double tol = 1e-6;
  int max_iter = 20000;
  unsigned long seed = 1;
  std::string out_path;
  std::string trace_path;
  bool oracle = false;
  std::string problem_path;
  std::vector<std::string> config_kv;
  std::string sweep_u;
  std::string levels_csv;
  double pair_g = 1.0;
  std::string pair_x_csv;

  app.add_option("--model", model, "hubbard | file | pairing")
      ->check(CLI::IsMember({"hubbard", "file", "pairing"}));
  app.add_option("--sites", sites, "lattice sites (hubbard)");
  app.add_option("--particles", particles, "particle number N");
  app.add_option("--t", hop_t, "hopping amplitude");
  app.add_option("--u", hub_u, "on-site repulsion U");
  app.add_option("--conditions", conditions, "comma list, e.g. I,Q,G,T1,T2 or GUTZ");
  app.add_option("--solver", solver, "dual-pr | pd-pc | bp")
      ->check(CLI::IsMember({"dual-pr", "pd-pc", "bp"}));
  app.add_option("--spin", spin, "target total spin S (adds the S^2 equality)");
  app.add_flag("--singlet-projection", singlet_projection,
               "add the particle-hole singlet projection equalities");
  app.add_flag("--nonlin-hopping", nonlin_hopping,
               "exact kinetic-floor constraint (hubbard + dual-pr only)");
  app.add_option("--subsystem", subsystem_path, "fragment constraint file");
  app.add_option("--sharp-rounds", sharp_rounds, "pair-bound sharpening rounds");
  app.add_option("--tol", tol, "per-dimension convergence target");
  app.add_option("--max-iter", max_iter, "iteration limit");
  app.add_option("--seed", seed, "random seed for seeded components");
  app.add_option("--out", out_path, "JSON report path (default stdout)");
  app.add_option("--trace", trace_path, "per-iteration CSV trace path");
  app.add_flag("--oracle", oracle, "also compute the exact ground state energy");
  app.add_option("--problem", problem_path, "problem file for --model file");
  app.add_option("--config", config_kv, "solver knob key=value (repeatable)");
  app.add_option("--sweep-u", sweep_u, "comma list of U values; emits a JSON array");
  app.add_option("--levels", levels_csv, "pairing level energies, comma list");
  app.add_option("--g", pair_g, "pairing strength");
  app.add_option("--pair-x", pair_x_csv, "pairing level amplitudes (default all 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    RunSettings rs;
    rs.solver = solver;
    rs.opt.tol = tol;
    rs.opt.max_iter = max_iter;
    rs.opt.seed = seed;
    rs.opt.collect_trace = !trace_path.empty();
    rs.sharp_rounds = sharp_rounds;
    rs.oracle = oracle;
    rs.trace_path = trace_path;
    for (const std::string& kv : config_kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--config", "expected key=value, got '" + kv + "'");
      std::string key = kv.substr(0, eq);
      double val = std::stod(kv.substr(eq + 1));
      if (key == "t_init") rs.opt.t_init = val;
      else if (key == "t_shrink") rs.opt.t_shrink = val;
      else if (key == "newton_tol") rs.opt.newton_tol = val;
      else if (key == "sigma0") rs.opt.sigma0 = val;
      else if (key == "sigma_scale") rs.opt.sigma_scale = val;
      else if (key == "stagnation_window") rs.opt.stagnation_window = int(val);
      else throw CLI::ValidationError("--config", "unknown key '" + key + "'");
    }

    ConditionSet cs = ConditionSet::parse(conditions);

    // Assemble the model.
    std::vector<double> u_values;
    if (!sweep_u.empty()) u_values = parse_csv_doubles(sweep_u);

    auto build = [&](double u) {
      ModelInfo mi;
      mi.particles = particles;
      mi.t = hop_t;
      mi.u = u;
      if (model == "hubbard") {
        mi.name = "hubbard";
        mi.sites = sites;
        return std::make_pair(hubbard_1d(sites, hop_t, u), mi);
      }
      if (model == "pairing") {
        if (levels_csv.empty())
          throw CLI::ValidationError("--levels", "required for the pairing model");
        std::vector<double> lv = parse_csv_doubles(levels_csv);
        Vec eps = Eigen::Map<Vec>(lv.data(), lv.size());
        Vec x = Vec::Ones(eps.size());
        if (!pair_x_csv.empty()) {
          std::vector<double> xv = parse_csv_doubles(pair_x_csv);
          if (int(xv.size()) != eps.size())
            throw CLI::ValidationError("--pair-x", "length mismatch with --levels");
          x = Eigen::Map<Vec>(xv.data(), xv.size());
        }
        mi.name = "pairing";
        mi.sites = int(eps.size());
        mi.u = pair_g;
        return std::make_pair(pairing_hamiltonian(eps, pair_g, x), mi);
      }
      if (problem_path.empty())
        throw CLI::ValidationError("--problem", "required for --model file");
      auto [H, n_file] = load_problem(problem_path);
      if (n_file > 0) particles = n_file;
      mi.name = "file";
      mi.sites = H.M;
      mi.particles = particles;
      return std::make_pair(H, mi);
    };

    if (nonlin_hopping && model != "hubbard")
      throw CLI::ValidationError("--nonlin-hopping", "requires the hubbard model");
    if (nonlin_hopping && solver != "dual-pr")
      throw CLI::ValidationError("--nonlin-hopping", "requires --solver dual-pr");

    bool any_failed = false;
    std::ostringstream body;
    if (u_values.empty()) {
      auto [H, mi] = build(hub_u);
      std::vector<LinearInequality> ineq;
      if (!subsystem_path.empty()) {
        SubsystemSpec spec = load_subsystem(subsystem_path, H);
        for (auto& c : subsystem_inequalities(spec, particles)) ineq.push_back(std::move(c));
      }
      std::optional<NonlinHopping> nonlin;
      if (nonlin_hopping) nonlin = build_nonlin_hopping(sites, hop_t, particles);
      bool failed = false;
      body << run_once(H, particles, cs, spin, singlet_projection, ineq, nonlin, mi, rs,
                       failed);
      any_failed |= failed;
    } else {
      body << "[\n";
      for (std::size_t i = 0; i < u_values.size(); ++i) {
        auto [H, mi] = build(u_values[i]);
        std::vector<LinearInequality> ineq;
        if (!subsystem_path.empty()) {
          SubsystemSpec spec = load_subsystem(subsystem_path, H);
          for (auto& c : subsystem_inequalities(spec, particles)) ineq.push_back(std::move(c));
        }
        std::optional<NonlinHopping> nonlin;
        if (nonlin_hopping) nonlin = build_nonlin_hopping(sites, hop_t, particles);
        bool failed = false;
        std::string r = run_once(H, particles, cs, spin, singlet_projection, ineq, nonlin,
                                 mi, rs, failed);
        any_failed |= failed;
        if (!r.empty() && r.back() == '\n') r.pop_back();
        body << r << (i + 1 < u_values.size() ? ",\n" : "\n");
      }
      body << "]\n";
    }

    if (out_path.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream out(out_path);
      if (!out) throw CLI::ValidationError("--out", "cannot open " + out_path);
      out << body.str();
    }
    return any_failed ? 2 : 0;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
