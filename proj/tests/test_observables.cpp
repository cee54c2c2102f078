#include "sbnrg/errors.hpp"
#include "sbnrg/observables.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sbnrg;

namespace {

KondoParams couplings(double jperp, double jpar, double h = 0.0) {
  KondoParams k;
  k.rho0_jperp = jperp;
  k.rho0_jpar = jpar;
  k.field = h;
  return k;
}

double max_asymmetry(const std::map<nrg::Sector, Eigen::MatrixXd> &op) {
  double worst = 0.0;
  for (const auto &[_, m] : op) worst = std::max(worst, (m - m.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

} // namespace

TEST_CASE("identity stays the identity under propagation") {
  const auto chain = build_chain(2.0, 20);
  auto s = nrg::init_impurity_site(couplings(0.04, 0.6, 0.01), 2.0);
  std::map<nrg::Sector, Eigen::MatrixXd> id;
  for (const auto &[sector, b] : s.blocks) id[sector] = Eigen::MatrixXd::Identity(b.kept, b.kept);
  for (int n = 0; n < 10; ++n) {
    s = nrg::truncate(nrg::add_site(s, chain), 120, 1e-10);
    id = propagate_operator(id, s);
  }
  for (const auto &[sector, m] : id)
    CHECK((m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).norm() < 1e-12);
}

TEST_CASE("operators stay symmetric over many propagations") {
  const auto chain = build_chain(2.0, 60);
  auto s = nrg::init_impurity_site(couplings(0.04, 0.6, 0.02), 2.0);
  auto ops = init_operator_blocks(s);
  for (int n = 0; n < 50; ++n) {
    s = nrg::truncate(nrg::add_site(s, chain), 100, 1e-10);
    ops = propagate(ops, s);
  }
  CHECK(ops.iteration == 50);
  CHECK(max_asymmetry(ops.ox) < 1e-12);
  CHECK(max_asymmetry(ops.oz) < 1e-12);
}

TEST_CASE("initial operators: two-state algebra") {
  const auto s = nrg::init_impurity_site(couplings(0.04, 0.6), 2.0);
  const auto ops = init_operator_blocks(s);
  // singlet-like ground state of (up, dn) and (dn, up): <ox> = -1, <Sz> = 0
  const auto raw = ground_expectation(s, ops, 1e-10);
  CHECK(raw.ox == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(raw.two_sz) < 1e-15);
  CHECK(raw.degeneracy == 1);
}

TEST_CASE("propagation rejects a stale iteration tag") {
  const auto chain = build_chain(2.0, 4);
  auto s = nrg::init_impurity_site(couplings(0.04, 0.6), 2.0);
  const auto ops = init_operator_blocks(s);
  s = nrg::add_site(nrg::add_site(s, chain), chain);
  CHECK_THROWS(propagate(ops, s));
  CHECK_THROWS(init_operator_blocks(s));
}

TEST_CASE("zero field: every kept state is unpolarized") {
  const auto chain = build_chain(2.0, 80);
  auto s = nrg::init_impurity_site(couplings(0.04, rho0_jpar_from_alpha(0.9)), 2.0);
  auto ops = init_operator_blocks(s);
  for (int n = 0; n < 70; ++n) {
    s = nrg::truncate(nrg::add_site(s, chain), 150, 1e-10);
    ops = propagate(ops, s);
  }
  double worst = 0.0;
  for (const auto &[sector, m] : ops.oz)
    if (sector.two_sz == 0) worst = std::max(worst, m.diagonal().cwiseAbs().maxCoeff());
  CHECK(worst < 1e-12);
}

TEST_CASE("reported signs") {
  const auto r = to_reported(RawExpectation{-0.4, -0.2, 1});
  CHECK(r.sx == 0.4);
  CHECK(r.sz == 0.2);
}

TEST_CASE("unconverged runs are refused") {
  const auto s = nrg::init_impurity_site(couplings(0.04, 0.6), 2.0);
  const auto ops = init_operator_blocks(s);
  CHECK_THROWS_AS(expectation_values(s, ops, false, false), NotConvergedError);
  CHECK(expectation_values(s, ops, false, true).sx == doctest::Approx(1.0));
}

TEST_CASE("entropy values") {
  // norm 0.6 -> p = 0.8, 0.2
  CHECK(entanglement_entropy(0.6, 0.0).entropy == doctest::Approx(0.7219280948873623).epsilon(1e-14));
  CHECK(entanglement_entropy(0.36, 0.48).entropy == doctest::Approx(0.7219280948873623).epsilon(1e-14));
  CHECK(entanglement_entropy(0.0, 0.0).entropy == 1.0);
  CHECK(entanglement_entropy(1.0, 0.0).entropy == 0.0);
  CHECK(entanglement_entropy(0.6, 0.8).entropy == 0.0);
  const auto e = entanglement_entropy(0.3, 0.4);
  CHECK(e.p_plus + e.p_minus == doctest::Approx(1.0));
  CHECK(e.p_plus == doctest::Approx(0.75));
}

TEST_CASE("entropy domain") {
  CHECK_THROWS_AS(entanglement_entropy(1.0, 0.01), NonphysicalStateError);
  // rounding noise just above 1 is clamped
  CHECK(entanglement_entropy(1.0 + 1e-9, 0.0).entropy == 0.0);
}

TEST_CASE("entropy: symmetric, decreasing in the norm, bounded") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double r = u(rng), phi = 2 * std::numbers::pi * u(rng);
    const double e = entanglement_entropy(r * std::cos(phi), r * std::sin(phi)).entropy;
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    CHECK(e == doctest::Approx(entanglement_entropy(r, 0.0).entropy).epsilon(1e-12));
    const double r2 = std::min(1.0, r + 0.01);
    CHECK(entanglement_entropy(r2, 0.0).entropy <= e);
  }
}

TEST_CASE("maximize_entropy on a smooth unimodal function") {
  const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int calls = 0;
  const auto f = [&](double a) {
    ++calls;
    return 1.0 - (a - 0.3721) * (a - 0.3721);
  };
  const auto m = maximize_entropy(f, grid, 0.01);
  CHECK(std::abs(m.alpha - 0.3721) <= 0.01);
  CHECK(m.evaluations == calls);
  const auto fine = maximize_entropy(f, grid, 1e-6);
  CHECK(std::abs(fine.alpha - 0.3721) <= 1e-6);
}

TEST_CASE("maximize_entropy needs an interior maximum") {
  const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4};
  CHECK_THROWS(maximize_entropy([](double a) { return a; }, grid));
  CHECK_THROWS(maximize_entropy([](double a) { return -a; }, grid));
  CHECK_THROWS(maximize_entropy([](double a) { return a; }, {0.1, 0.2}));
}
