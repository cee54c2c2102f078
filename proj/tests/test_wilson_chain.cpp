#include "sbnrg/errors.hpp"
#include "sbnrg/wilson_chain.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace sbnrg;

TEST_CASE("first coefficients at lambda = 2") {
  // xi_0 = (1/2) / sqrt((1/2)(7/8))
  CHECK(wilson_xi(2.0, 0) == doctest::Approx(0.755928946018454).epsilon(1e-14));
  const auto c = build_chain(2.0, 3);
  REQUIRE(c.length == 3);
  CHECK(c.hop[0] == doctest::Approx(0.75 * 0.755928946018454).epsilon(1e-14));
  // xi_1 = (3/4) / sqrt((7/8)(31/32))
  CHECK(c.xi[1] == doctest::Approx(0.75 / std::sqrt(7.0 / 8 * 31.0 / 32)).epsilon(1e-14));
  CHECK(c.hop[1] == doctest::Approx(0.75 * c.xi[1] / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("xi tends to 1 and hoppings decay as lambda^(-n/2)") {
  for (double lambda : {1.5, 2.0, 3.0}) {
    const auto c = build_chain(lambda, 80);
    // 1 - xi_n = L^-(n+1) + O(L^-2n)
    for (std::size_t n = 1; n < 80; ++n) {
      const double lead = std::pow(lambda, -static_cast<double>(n) - 1);
      CHECK(std::abs(1.0 - c.xi[n] - lead) <= 2 * lead * lead * lambda + 1e-15);
    }
    for (std::size_t n = 50; n + 1 < 80; ++n)
      CHECK(c.hop[n + 1] / c.hop[n] == doctest::Approx(1.0 / std::sqrt(lambda)).epsilon(1e-8));
  }
}

TEST_CASE("continuum limit of the first hopping") {
  // flat band: t_0^2 = <eps^2> = 1/3
  CHECK(build_chain(1.0001, 1).hop[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));
}

TEST_CASE("energy scale") {
  CHECK(energy_scale(2.0, 21) == std::ldexp(1.0, -10));
  CHECK(energy_scale(1.5, 3) == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
  CHECK(energy_scale(2.0, 1) == 1.0);
}

TEST_CASE("single-particle spectrum is particle-hole symmetric") {
  const auto c = build_chain(2.0, 11);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(12, 12);
  for (int i = 0; i < 11; ++i) h(i, i + 1) = h(i + 1, i) = c.hop[i];
  const Eigen::VectorXd e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
  for (int i = 0; i < 12; ++i) CHECK(std::abs(e(i) + e(11 - i)) < 1e-14);
}

TEST_CASE("invalid chains") {
  CHECK_THROWS_AS(build_chain(1.0, 10), DomainError);
  CHECK_THROWS_AS(build_chain(0.5, 10), DomainError);
  CHECK_THROWS_AS(build_chain(2.0, 0), DomainError);
}
