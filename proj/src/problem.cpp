#include "v2dm/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace v2dm {

SDPProblem::SDPProblem(int M, int N, const ConditionSet& conds, Mat h2_in)
    : sp(M, N), cs(conds), h2(std::move(h2_in)) {
  if (h2.rows() != sp.dims.d2 || h2.cols() != sp.dims.d2)
    throw std::invalid_argument("SDPProblem: Hamiltonian dimension mismatch");
}

void SDPProblem::finalize() {
  const int M = sp.M(), N = sp.N();
  const int d2 = sp.dims.d2;
  c0.clear();
  c0t.clear();
  for (const auto& iq : inequalities) {
    c0.push_back(homogenize_inequality(iq, M, N));
    c0t.push_back(project_traceless(c0.back(), M));
  }
  // Orthonormal basis of the span of the trace condition and all equalities,
  // targets transported alongside.
  etil.clear();
  etval.clear();
  const double tb_target = 0.5 * double(N) * (N - 1);
  std::vector<std::pair<Mat, double>> raw;
  raw.emplace_back(Mat::Identity(d2, d2), tb_target);
  for (const auto& eq : equalities) {
    if (eq.E.rows() != d2 || eq.E.cols() != d2)
      throw std::invalid_argument("SDPProblem: equality dimension mismatch");
    raw.emplace_back(0.5 * (eq.E + eq.E.transpose()), eq.e);
  }
  for (auto& [e, val] : raw) {
    const double scale0 = std::sqrt(tb_inner(e, e));
    Mat r = e;
    double v = val;
    for (size_t k = 0; k < etil.size(); ++k) {
      const double ov = tb_inner(r, etil[k]);
      r -= ov * etil[k];
      v -= ov * etval[k];
    }
    const double nrm = std::sqrt(tb_inner(r, r));
    if (nrm <= 1e-10 * std::max(scale0, 1.0)) {
      // Dependent direction: the target must be consistent.
      if (std::abs(v) > 1e-8 * std::max(1.0, std::abs(val)))
        throw std::invalid_argument("SDPProblem: inconsistent equality constraints");
      continue;
    }
    etil.push_back(r / nrm);
    etval.push_back(v / nrm);
  }
  equality_rank = static_cast<int>(etil.size());
  gamma_center = Mat::Zero(d2, d2);
  for (size_t k = 0; k < etil.size(); ++k) gamma_center += etval[k] * etil[k];
}

Mat SDPProblem::project(const Mat& a) const {
  Mat out = 0.5 * (a + a.transpose());
  for (const Mat& e : etil) out -= tb_inner(out, e) * e;
  return out;
}

int SDPProblem::barrier_dimension() const {
  int n = static_cast<int>(inequalities.size());
  for (Cond c : cs.conds()) n += cond_block_dim(c, sp.dims);
  if (nonlin) n += 1;
  return n;
}

SDPProblem make_problem(const Hamiltonian& H, int N, const ConditionSet& cs,
                        std::optional<double> spin,
                        bool singlet_projection,
                        const std::vector<LinearInequality>& extra_ineq,
                        std::optional<NonlinHopping> nonlin) {
  SDPProblem prob(H.M, N, cs, reduced_hamiltonian(H, N));
  if (spin) prob.equalities.push_back(spin_squared_equality(H.M, N, *spin));
  if (singlet_projection) {
    auto eqs = singlet_projection_equalities(H.M, N);
    prob.equalities.insert(prob.equalities.end(), eqs.begin(), eqs.end());
  }
  prob.inequalities = extra_ineq;
  prob.nonlin = std::move(nonlin);
  prob.finalize();
  return prob;
}

}  // namespace v2dm
