#include "sbnrg/calibration.hpp"
#include "sbnrg/errors.hpp"
#include "sbnrg/param_map.hpp"

#include <doctest.h>

using namespace sbnrg;

// Reference values from an independent single-particle computation
// (numpy, chains of 41 / 69 sites).

TEST_CASE("free chain: spin flip has dimension 1") {
  CHECK(flip_exponent(2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exponent drifts above alpha on a coarse chain") {
  CHECK(flip_exponent(2.0, rho0_jpar_from_alpha(0.3)) == doctest::Approx(0.31353700).epsilon(1e-5));
  CHECK(flip_exponent(2.0, rho0_jpar_from_alpha(0.5)) == doctest::Approx(0.51388178).epsilon(1e-5));
  CHECK(flip_exponent(1.5, rho0_jpar_from_alpha(0.3)) == doctest::Approx(0.30469210).epsilon(1e-5));
}

TEST_CASE("exponent approaches alpha as lambda -> 1") {
  const double j = rho0_jpar_from_alpha(0.5);
  const double x2 = flip_exponent(2.0, j);
  const double x15 = flip_exponent(1.5, j);
  const double x12 = flip_exponent(1.2, j);
  CHECK(x2 > x15);
  CHECK(x15 > x12);
  CHECK(x12 == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("calibrated couplings") {
  CHECK(calibrated_rho0_jpar(0.3, 2.0) == doctest::Approx(1.13885920).epsilon(1e-4));
  CHECK(calibrated_rho0_jpar(0.5, 2.0) == doctest::Approx(0.65600649).epsilon(1e-4));
  CHECK(calibrated_rho0_jpar(0.5, 1.5) == doctest::Approx(0.63956533).epsilon(1e-4));
}

TEST_CASE("calibration inverts the exponent") {
  for (double lambda : {1.5, 2.0, 3.0})
    for (double a = 0.05; a < 0.96; a += 0.1) {
      const double j = calibrated_rho0_jpar(a, lambda);
      CHECK(flip_exponent(lambda, j) == doctest::Approx(a).epsilon(1e-9));
      // the chain needs a stronger coupling than the continuum
      CHECK(j > rho0_jpar_from_alpha(a));
    }
}

TEST_CASE("exponent decreases monotonically with the coupling") {
  double prev = 1.1;
  for (double j = 0.0; j < 8.0; j += 0.25) {
    const double x = flip_exponent(2.0, j);
    CHECK(x < prev);
    prev = x;
  }
}

TEST_CASE("calibration domain") {
  CHECK_THROWS_AS(calibrated_rho0_jpar(0.0, 2.0), DomainError);
  CHECK_THROWS_AS(calibrated_rho0_jpar(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(flip_exponent(1.0, 1.0), DomainError);
}
