#pragma once

#include "v2dm/basis.hpp"

#include <vector>

namespace v2dm {

/// Site density-density correlation C(r) = (1/L) sum_j <n_j n_{j+r}>,
/// computed from the particle-hole matrix of Gamma (Hubbard orbital order).
std::vector<double> charge_correlation(const Mat& g2, const Spaces& sp, int L);

/// Spin-spin correlation S(r) = (1/L) sum_j <s^z_j s^z_{j+r}> (units of
/// hbar = 1, s^z = (n_up - n_down)/2).
std::vector<double> spin_correlation(const Mat& g2, const Spaces& sp, int L);

/// Momentum occupation n(k_m), k_m = 2 pi m / L, summed over spin.
std::vector<double> momentum_distribution(const Mat& g2, const Spaces& sp, int L);

/// Plain Fourier transform C(k) = sum_r cos(kr) C(r), k = 2 pi m / L.
std::vector<double> charge_structure_factor(const std::vector<double>& cr);

}  // namespace v2dm
