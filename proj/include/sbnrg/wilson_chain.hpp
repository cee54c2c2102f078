#pragma once

#include <cstddef>
#include <vector>

namespace sbnrg {

/// Logarithmically discretized flat band mapped onto a tight-binding chain.
/// hop[n] couples sites n and n+1 (D0 units).
struct WilsonChain {
  double lambda = 2.0;
  std::size_t length = 0;
  std::vector<double> xi;
  std::vector<double> hop;
};

/// xi_n = (1 - L^-(n+1)) / sqrt((1 - L^-(2n+1)) (1 - L^-(2n+3))),
/// hop_n = (1 + 1/L)/2 xi_n L^(-n/2).
double wilson_xi(double lambda, std::size_t n);

WilsonChain build_chain(double lambda, std::size_t n_max);

/// Lowest energy scale of H_N: L^(-(N-1)/2).
double energy_scale(double lambda, int n);

} // namespace sbnrg
