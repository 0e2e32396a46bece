#include "v2dm/observables.hpp"

#include "v2dm/maps.hpp"

#include <cmath>
#include <stdexcept>

namespace v2dm {

namespace {

void check_lattice(const Spaces& sp, int L) {
  if (sp.M() != 2 * L)
    throw std::invalid_argument("observables: orbital count does not match the lattice");
}

}  // namespace

std::vector<double> charge_correlation(const Mat& g2, const Spaces& sp, int L) {
  check_lattice(sp, L);
  const int M = sp.M();
  const Mat g = map_G(g2, sp);
  std::vector<double> out(L, 0.0);
  for (int r = 0; r < L; ++r) {
    double acc = 0.0;
    for (int j = 0; j < L; ++j) {
      const int k = (j + r) % L;
      for (int s = 0; s < 2; ++s)
        for (int sp2 = 0; sp2 < 2; ++sp2) {
          const int a = 2 * j + s, b = 2 * k + sp2;
          // <n_a n_b> = <a+_a a_a a+_b a_b> = G_(aa);(bb).
          acc += g(a * M + a, b * M + b);
        }
    }
    out[r] = acc / L;
  }
  return out;
}

std::vector<double> spin_correlation(const Mat& g2, const Spaces& sp, int L) {
  check_lattice(sp, L);
  const int M = sp.M();
  const Mat g = map_G(g2, sp);
  std::vector<double> out(L, 0.0);
  for (int r = 0; r < L; ++r) {
    double acc = 0.0;
    for (int j = 0; j < L; ++j) {
      const int k = (j + r) % L;
      for (int s = 0; s < 2; ++s)
        for (int sp2 = 0; sp2 < 2; ++sp2) {
          const int a = 2 * j + s, b = 2 * k + sp2;
          const double w = (s == sp2 ? 0.25 : -0.25);
          acc += w * g(a * M + a, b * M + b);
        }
    }
    out[r] = acc / L;
  }
  return out;
}

std::vector<double> momentum_distribution(const Mat& g2, const Spaces& sp, int L) {
  check_lattice(sp, L);
  const Mat rho = rho_from_gamma(g2, sp);
  std::vector<double> out(L, 0.0);
  for (int m = 0; m < L; ++m) {
    const double k = 2.0 * M_PI * m / L;
    double acc = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
          acc += std::cos(k * (i - j)) * rho(2 * i + s, 2 * j + s);
    out[m] = acc / L;
  }
  return out;
}

std::vector<double> charge_structure_factor(const std::vector<double>& cr) {
  const int L = static_cast<int>(cr.size());
  std::vector<double> out(L, 0.0);
  for (int m = 0; m < L; ++m) {
    const double k = 2.0 * M_PI * m / L;
    double acc = 0.0;
    for (int r = 0; r < L; ++r) acc += std::cos(k * r) * cr[r];
    out[m] = acc;
  }
  return out;
}

}  // namespace v2dm
