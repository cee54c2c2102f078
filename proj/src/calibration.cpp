#include "sbnrg/calibration.hpp"

#include "sbnrg/errors.hpp"
#include "sbnrg/param_map.hpp"
#include "sbnrg/wilson_chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace sbnrg {

namespace {

// Orbitals of the lowest `count` single-particle levels.
Eigen::MatrixXd lowest_orbitals(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> &eig,
                                Eigen::Index count) {
  return eig.eigenvectors().leftCols(count);
}

Eigen::Index negative_levels(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> &eig) {
  return (eig.eigenvalues().array() < 0.0).count();
}

// |<Phi'| c_0^dag |Phi>| for Slater determinants with orbitals `after`
// (n + 1 columns) and `before` (n columns).
double add_amplitude(const Eigen::MatrixXd &after, const Eigen::MatrixXd &before) {
  Eigen::MatrixXd m(before.rows(), before.cols() + 1);
  m.col(0).setZero();
  m(0, 0) = 1.0;
  m.rightCols(before.cols()) = before;
  return std::abs((after.transpose() * m).determinant());
}

// |<GS(-V)| f0up^dag f0dn |GS(+V)>| on a chain with sites 0..n.
double flip_element(const WilsonChain &chain, int n, double v) {
  const Eigen::Index size = n + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index i = 0; i + 1 < size; ++i) {
    h(i, i + 1) = chain.hop[static_cast<std::size_t>(i)];
    h(i + 1, i) = chain.hop[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd hp = h, hm = h;
  hp(0, 0) = v;
  hm(0, 0) = -v;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(hp), em(hm);
  if (ep.info() != Eigen::Success || em.info() != Eigen::Success)
    throw EigensolverError("single-particle chain diagonalization failed");

  // Impurity up: spin up sees +V, spin down -V. After the flip both reverse;
  // one electron moves from the down to the up channel.
  const Eigen::Index n_up = negative_levels(ep);
  const Eigen::Index n_dn = negative_levels(em);
  const double up = add_amplitude(lowest_orbitals(em, n_up + 1), lowest_orbitals(ep, n_up));
  const double dn = add_amplitude(lowest_orbitals(em, n_dn), lowest_orbitals(ep, n_dn - 1));
  return up * dn;
}

} // namespace

double flip_exponent(double lambda, double rho0_jpar) {
  if (!(lambda > 1.0)) throw DomainError("lambda must be > 1");
  if (!(rho0_jpar >= 0.0)) throw DomainError("rho0_jpar must be >= 0");
  // Deep enough that w_N ~ 1e-6: the exponent has settled by then.
  const int n = std::max(20, 2 * static_cast<int>(std::ceil(std::log(1e6) / std::log(lambda))));
  const auto chain = build_chain(lambda, static_cast<std::size_t>(n + 2));
  const double v = 0.5 * rho0_jpar; // Jpar / 4 in D0 units
  const double m1 = flip_element(chain, n, v);
  const double m2 = flip_element(chain, n + 2, v);
  // Two sites later w_N has shrunk by 1 / lambda.
  return std::log(m1 / m2) / std::log(lambda);
}

double calibrated_rho0_jpar(double alpha, double lambda) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  // x falls monotonically from 1 at Jpar = 0 towards 0 as Jpar grows.
  double lo = 0.0;
  double hi = std::max(1.0, rho0_jpar_from_alpha(alpha));
  while (flip_exponent(lambda, hi) > alpha) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6)
      throw DomainError("no longitudinal coupling reproduces alpha = " + std::to_string(alpha));
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (flip_exponent(lambda, mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace sbnrg
