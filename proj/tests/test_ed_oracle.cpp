#include "sbnrg/ed_oracle.hpp"
#include "sbnrg/errors.hpp"
#include "sbnrg/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace sbnrg;
using namespace sbnrg::ed;

namespace {

KondoParams couplings(double jperp, double jpar, double h = 0.0) {
  KondoParams k;
  k.rho0_jperp = jperp;
  k.rho0_jpar = jpar;
  k.field = h;
  return k;
}

} // namespace

TEST_CASE("canonical anticommutation relations") {
  const auto basis = make_basis(2);
  for (int a = 0; a < basis.modes(); ++a)
    for (int b = 0; b < basis.modes(); ++b) {
      const Eigen::MatrixXd ca = creation_matrix(basis, a);
      const Eigen::MatrixXd cb = creation_matrix(basis, b);
      const Eigen::MatrixXd anti = ca.transpose() * cb + cb * ca.transpose();
      const auto dim = static_cast<Eigen::Index>(basis.size());
      const Eigen::MatrixXd expect = (a == b ? 1.0 : 0.0) * Eigen::MatrixXd::Identity(dim, dim);
      CHECK((anti - expect).norm() == 0.0);
      CHECK((ca * cb + cb * ca).norm() == 0.0);
    }
}

TEST_CASE("hopping matrix is built from the Jordan-Wigner operators") {
  const auto basis = make_basis(3);
  for (int a = 0; a < 2; ++a) {
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int spin = 0; spin < 2; ++spin) {
      const Eigen::MatrixXd up = creation_matrix(basis, mode_index(a + 1, spin)) *
                                 creation_matrix(basis, mode_index(a, spin)).transpose();
      expect += up + up.transpose();
    }
    CHECK((hopping_matrix(basis, a) - expect).norm() == 0.0);
  }
}

TEST_CASE("Hamiltonian is symmetric and conserves charge and Sz") {
  const auto chain = build_chain(2.0, 4);
  const auto basis = make_basis(3);
  const Eigen::MatrixXd h = hamiltonian(couplings(0.05, 0.7, 0.03), chain, 3);
  CHECK((h - h.transpose()).norm() == 0.0);
  for (std::uint32_t i = 0; i < basis.size(); ++i)
    for (std::uint32_t j = 0; j < basis.size(); ++j)
      if (h(i, j) != 0.0) {
        CHECK(basis.charge(i) == basis.charge(j));
        CHECK(basis.two_sz(i) == basis.two_sz(j));
      }
}

TEST_CASE("single site: analytic ground energy") {
  const auto chain = build_chain(2.0, 1);
  for (const auto &k : {couplings(0.04, 0.6), couplings(0.1, 1.3), couplings(0.01, 0.2)}) {
    const auto g = exact_ground(k, chain, 1);
    CHECK(std::abs(g.e0 - (-k.jpar() / 4 - k.jperp() / 2)) <= 1e-12);
    CHECK(g.sx_raw == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("Hellmann-Feynman residual and its dj^2 scaling") {
  const auto chain = build_chain(2.0, 4);
  const auto k = couplings(0.04, 0.8, 0.0);
  CHECK(hellmann_feynman_check(k, chain, 3).residual < 1e-8);
  // central difference: error ~ dj^2
  const double r1 = hellmann_feynman_check(k, chain, 3, 0.2 * k.jperp()).residual;
  const double r2 = hellmann_feynman_check(k, chain, 3, 0.1 * k.jperp()).residual;
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("untruncated NRG equals ED on 1-5 sites") {
  const auto chain = build_chain(2.0, 6);
  for (const auto &k : oracle_coupling_sets())
    for (int sites = 1; sites <= kMaxSites; ++sites) {
      const auto rep = compare_with_nrg(k, chain, sites);
      CHECK(rep.pass);
      CHECK_FALSE(rep.truncated);
      CHECK(rep.levels_compared == make_basis(sites).size());
      CHECK(rep.max_eigenvalue_deviation <= 1e-9);
    }
}

TEST_CASE("dropping the fermion signs is caught") {
  const auto chain = build_chain(2.0, 6);
  bool caught = false;
  for (const auto &k : oracle_coupling_sets())
    caught = caught || !compare_with_nrg(k, chain, 3, {}, 1e-9, true).pass;
  CHECK(caught);
}

TEST_CASE("a truncated comparison does not pass") {
  const auto chain = build_chain(2.0, 6);
  const auto rep = compare_with_nrg(couplings(0.05, 0.7, 0.01), chain, 4, 50);
  CHECK(rep.truncated);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("size limits") {
  CHECK_THROWS_AS(make_basis(0), DomainError);
  CHECK_THROWS_AS(make_basis(kMaxSites + 1), DomainError);
  const auto chain = build_chain(2.0, 8);
  CHECK_THROWS_AS(exact_ground(couplings(0.04, 0.6), chain, 6), DomainError);
}
