#pragma once

#include "v2dm/problem.hpp"

#include <string>

namespace v2dm {

/// Model metadata echoed into reports.
struct ModelInfo {
  std::string name;      ///< "hubbard", "pairing", "file"
  int sites = 0;
  int particles = 0;
  double t = 0.0;
  double u = 0.0;
};

/**
 * Serializes a run into the versioned JSON report (schema 1): energy,
 * optimality measures, iteration counts, wall times, the condition set and
 * the model block.  Deterministic runs produce byte-identical output except
 * for the "timings" object.
 */
std::string report_json(const SolverReport& rep, const SDPProblem& prob,
                        const ModelInfo& model, const std::string& solver,
                        double seconds, int spin_projection_rank,
                        double exact_energy, bool have_exact);

/// Writes the per-iteration trace as CSV (columns from the rows' keys).
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

}  // namespace v2dm
