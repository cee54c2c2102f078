#include "sbnrg/wilson_chain.hpp"

#include "sbnrg/errors.hpp"

#include <cmath>
#include <string>

namespace sbnrg {

double wilson_xi(double lambda, std::size_t n) {
  const double x = static_cast<double>(n);
  const double num = 1.0 - std::pow(lambda, -(x + 1.0));
  const double den = (1.0 - std::pow(lambda, -(2.0 * x + 1.0))) *
                     (1.0 - std::pow(lambda, -(2.0 * x + 3.0)));
  return num / std::sqrt(den);
}

WilsonChain build_chain(double lambda, std::size_t n_max) {
  if (!(lambda > 1.0))
    throw DomainError("discretization parameter must satisfy lambda > 1, got " +
                      std::to_string(lambda));
  if (n_max < 1)
    throw DomainError("chain length must be at least 1");

  WilsonChain chain;
  chain.lambda = lambda;
  chain.length = n_max;
  chain.xi.resize(n_max);
  chain.hop.resize(n_max);
  for (std::size_t n = 0; n < n_max; ++n) {
    chain.xi[n] = wilson_xi(lambda, n);
    chain.hop[n] = 0.5 * (1.0 + 1.0 / lambda) * chain.xi[n] * std::pow(lambda, -0.5 * static_cast<double>(n));
  }
  return chain;
}

double energy_scale(double lambda, int n) {
  return std::pow(lambda, -0.5 * (n - 1));
}

} // namespace sbnrg
