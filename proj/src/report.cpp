#include "v2dm/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace v2dm {

std::string report_json(const SolverReport& rep, const SDPProblem& prob,
                        const ModelInfo& model, const std::string& solver,
                        double seconds, int spin_projection_rank,
                        double exact_energy, bool have_exact) {
  nlohmann::json j;
  j["schema"] = 1;
  j["solver"] = solver;
  j["energy"] = rep.energy;
  j["gap"] = rep.gap;
  j["primal_bound"] = rep.primal_bound;
  j["primal_infeasibility"] = rep.primal_infeas;
  j["dual_infeasibility"] = rep.dual_infeas;
  j["iterations"] = rep.iterations;
  j["newton_steps"] = rep.newton_steps;
  j["matvecs"] = rep.matvecs;
  j["converged"] = rep.converged;
  j["termination"] = rep.termination;

  nlohmann::json jm;
  jm["name"] = model.name;
  jm["sites"] = model.sites;
  jm["particles"] = model.particles;
  jm["t"] = model.t;
  jm["u"] = model.u;
  j["model"] = jm;

  nlohmann::json jc = nlohmann::json::array();
  for (Cond c : prob.cs.conds()) jc.push_back(cond_name(c));
  j["conditions"] = jc;
  j["inequalities"] = static_cast<int>(prob.c0.size());
  j["equality_rank"] = prob.equality_rank;
  if (spin_projection_rank >= 0) j["spin_projection_rank"] = spin_projection_rank;
  if (prob.nonlin) j["nonlinear_hopping"] = true;
  if (have_exact) j["exact_energy"] = exact_energy;

  j["timings"] = nlohmann::json{{"seconds", seconds}};
  return j.dump(2) + "\n";
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  if (rows.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  const auto& head = rows.front().cols;
  for (std::size_t c = 0; c < head.size(); ++c)
    out << (c ? "," : "") << head[c].first;
  out << "\n";
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.cols.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", row.cols[c].second);
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace v2dm
