#include "v2dm/constraints.hpp"

#include "v2dm/maps.hpp"
#include "v2dm/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace v2dm {

Mat homogenize_inequality(const LinearInequality& iq, int M, int N) {
  const int d2 = M * (M - 1) / 2;
  if (iq.C.rows() != d2 || iq.C.cols() != d2)
    throw std::invalid_argument("homogenize_inequality: dimension mismatch");
  return iq.C - (2.0 * iq.c / (double(N) * (N - 1))) * Mat::Identity(d2, d2);
}

LinearEquality spin_squared_equality(int M, int N, double S) {
  if (M % 2) throw std::invalid_argument("spin_squared_equality: odd orbital count");
  PairBasis pb(M);
  const int d2 = pb.size();
  // Raw product elements <(a s)(b t)| 2 s1.s2 |(c u)(d v)>: diagonal +-1/2,
  // +1 for a two-site spin flip.
  auto raw = [&](int al, int be, int ga, int de) -> double {
    const int sa = al % 2, sb = be % 2, sg = ga % 2, sd = de % 2;
    const int oa = al / 2, ob = be / 2, og = ga / 2, od = de / 2;
    if (oa != og || ob != od) return 0.0;
    if (sa == sg && sb == sd) {
      if (sa == sb) return 0.5;          // parallel spins
      return -0.5;                        // antiparallel
    }
    if (sa != sg && sb != sd && sa == sd && sb == sg) return 1.0;  // flip
    return 0.0;
  };
  Mat V = Mat::Zero(d2, d2);
  for (int p = 0; p < d2; ++p) {
    const auto& [al, be] = pb.pair(p);
    for (int q = 0; q < d2; ++q) {
      const auto& [ga, de] = pb.pair(q);
      V(p, q) = raw(al, be, ga, de) - raw(al, be, de, ga);
    }
  }
  LinearEquality eq;
  eq.E = pair_embed(0.75 * Mat::Identity(M, M), pb) / (N - 1) + V;
  eq.e = S * (S + 1.0);
  return eq;
}

std::vector<LinearEquality> singlet_projection_equalities(int M, int N) {
  if (M % 2) throw std::invalid_argument("singlet_projection_equalities: odd orbital count");
  Spaces sp(M, N);
  Vec vz = Vec::Zero(M * M);
  for (int g = 0; g < M; ++g) vz[g * M + g] = (g % 2 == 0) ? 0.5 : -0.5;
  std::vector<LinearEquality> out;
  out.reserve(M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      Mat e = Mat::Zero(M * M, M * M);
      e.row(a * M + b) = 0.5 * vz.transpose();
      e.col(a * M + b) += 0.5 * vz;
      LinearEquality eq;
      eq.E = adj_G(e, sp);
      eq.e = 0.0;
      out.push_back(std::move(eq));
    }
  return out;
}

double nonlin_f_star(const NonlinHopping& nl, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("nonlin_f_star: p outside [0,1]");
  if (p > nl.p_branch) return nl.T0;
  return (1.0 - p) * nl.Tinf + nl.T0 * (p + 2.0 * std::sqrt(p * (1.0 - p)));
}

double nonlin_g(const NonlinHopping& nl, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("nonlin_g: p outside [0,1]");
  if (p > nl.p_branch) return 0.0;
  return nl.T0 - nl.Tinf + nl.T0 * (1.0 - 2.0 * p) / std::sqrt(p * (1.0 - p));
}

double nonlin_h(const NonlinHopping& nl, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("nonlin_h: p outside [0,1]");
  if (p > nl.p_branch) return 0.0;
  const double w = p * (1.0 - p);
  const double d2 = 1.0 - 2.0 * p;
  return -(nl.T0 * d2 * d2 / (2.0 * std::pow(w, 1.5)) + 2.0 * nl.T0 / std::sqrt(w));
}

NonlinHopping build_nonlin_hopping(int L, double t, int N) {
  NonlinHopping nl;
  nl.T0 = hopping_min_full(L, N, t);
  nl.Tinf = hopping_min_singly_occupied(L, N, t);
  const double c = (nl.Tinf - nl.T0) / (2.0 * nl.T0);
  nl.p_branch = (c * c) / (1.0 + c * c);
  const int M = 2 * L;
  PairBasis pb(M);
  Mat thop = Mat::Zero(M, M);
  for (int i = 0; i < L; ++i) {
    const int j = (i + 1) % L;
    for (int s = 0; s < 2; ++s) {
      thop(2 * i + s, 2 * j + s) -= t;
      thop(2 * j + s, 2 * i + s) -= t;
    }
  }
  nl.T = pair_embed(thop, pb) / (N - 1);
  nl.P = Mat::Zero(pb.size(), pb.size());
  for (int i = 0; i < L; ++i) {
    const int p = pb.slot(2 * i, 2 * i + 1);
    nl.P(p, p) = 1.0;
  }
  return nl;
}

}  // namespace v2dm
