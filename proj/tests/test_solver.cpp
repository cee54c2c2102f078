#include "sbnrg/errors.hpp"
#include "sbnrg/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace sbnrg;

namespace {

SpinBosonPoint point(double alpha, double eps, double ratio = 0.04) {
  return {.alpha = alpha, .epsilon = eps, .delta_ratio = ratio};
}

} // namespace

TEST_CASE("run stops once below eta * Delta_r with a plateau") {
  const NRGConfig cfg;
  const auto r = run(map_to_kondo(point(0.5, 0.0)), cfg);
  CHECK(r.report.converged);
  CHECK(r.report.delta_r == doctest::Approx(0.0032));
  // 2^(-(N-1)/2) < 3.2e-5 needs N >= 31
  CHECK(r.report.n_m >= 31);
  CHECK(energy_scale(cfg.lambda, r.report.n_m) < cfg.eta * r.report.delta_r);
  CHECK(r.report.drift < cfg.plateau_tol);
  CHECK(r.report.history.size() == static_cast<std::size_t>(r.report.n_m + 1));
}

TEST_CASE("too few iterations are reported as unconverged") {
  NRGConfig cfg;
  cfg.n_max = 12;
  const auto r = run(map_to_kondo(point(0.5, 0.0)), cfg);
  CHECK_FALSE(r.report.converged);
  CHECK_FALSE(r.report.scale_reached);
  CHECK(r.report.n_m == 12);
  CHECK_THROWS_AS(expectation_values(r.state, r.ops, r.report.converged, false),
                  NotConvergedError);
  CHECK_FALSE(run_point(point(0.5, 0.0), cfg).converged);
}

TEST_CASE("stop_at fixes the final iteration") {
  RunOptions opts;
  opts.stop_at = 20;
  const auto r = run(map_to_kondo(point(0.3, 0.1)), NRGConfig{}, opts);
  CHECK(r.report.n_m == 20);
  CHECK(r.state.n == 20);
}

TEST_CASE("levels flow to a fixed point") {
  // Corrections die off like w_N / Delta_r; N = 70 is ~7 decades past Delta_r.
  RunOptions opts;
  opts.record_levels = 12;
  opts.stop_at = 70;
  const auto r = run(map_to_kondo(point(0.5, 0.0)), NRGConfig{}, opts);
  const auto &lv = r.report.levels;
  auto drift = [&](std::size_t n) {
    double d = 0.0;
    for (std::size_t i = 0; i < lv[n].size(); ++i) d = std::max(d, std::abs(lv[n][i] - lv[n - 2][i]));
    return d;
  };
  CHECK(drift(70) < 1e-4);
  CHECK(drift(70) < drift(50));
  CHECK(drift(50) < drift(36));
}

TEST_CASE("zero bias leaves sigma_z at zero") {
  for (double a : {0.1, 0.5, 0.9}) {
    const auto rec = run_point(point(a, 0.0), NRGConfig{});
    CHECK(std::abs(rec.sz) < 1e-12);
    CHECK(rec.sx > 0.0);
  }
}

TEST_CASE("a positive bias polarizes along +z") {
  const auto rec = run_point(point(0.5, 0.1), NRGConfig{});
  CHECK(rec.sz > 0.0);
  CHECK(rec.sx > 0.0);
  CHECK(rec.norm <= 1.0);
  CHECK(rec.entropy == doctest::Approx(entanglement_entropy(rec.sx, rec.sz).entropy));
}

TEST_CASE("symmetric and plain engines agree") {
  RunOptions plain;
  plain.engine.use_spin_flip_symmetry = false;
  const auto k = map_to_kondo(point(0.4, 0.0));
  const auto a = run(k, NRGConfig{});
  const auto b = run(k, NRGConfig{}, plain);
  CHECK(a.raw.ox == doctest::Approx(b.raw.ox).epsilon(1e-6));
  CHECK(std::abs(a.raw.two_sz) < 1e-12);
  CHECK(std::abs(b.raw.two_sz) < 1e-6);
}

TEST_CASE("calibration can be switched off") {
  NRGConfig cfg;
  const auto k = map_to_kondo(point(0.5, 0.0));
  RunOptions opts;
  opts.stop_at = 2;
  CHECK(run(k, cfg, opts).report.chain_rho0_jpar == doctest::Approx(0.65600649).epsilon(1e-4));
  cfg.calibrate_jpar = false;
  CHECK(run(k, cfg, opts).report.chain_rho0_jpar == k.rho0_jpar);
}

TEST_CASE("run_point is deterministic") {
  const auto a = run_point(point(0.35, 0.2), NRGConfig{});
  const auto b = run_point(point(0.35, 0.2), NRGConfig{});
  CHECK(a == b);
}

TEST_CASE("invalid configurations") {
  const auto k = map_to_kondo(point(0.5, 0.0));
  NRGConfig cfg;
  cfg.lambda = 1.0;
  CHECK_THROWS_AS(run(k, cfg), DomainError);
  cfg = {};
  cfg.n_keep = 4;
  CHECK_THROWS_AS(run(k, cfg), DomainError);
  cfg = {};
  cfg.eta = 0.0;
  CHECK_THROWS_AS(run(k, cfg), DomainError);
  KondoParams ferro = k;
  ferro.rho0_jpar = -0.1;
  CHECK_THROWS_AS(run(ferro, NRGConfig{}), DomainError);
}

TEST_CASE("alpha_M moves down as the bias grows") {
  const NRGConfig cfg;
  const auto a = find_alpha_max(0.02, 0.04, cfg, 2);
  const auto b = find_alpha_max(0.1, 0.04, cfg, 2);
  const auto c = find_alpha_max(0.5, 0.04, cfg, 2);
  CHECK(a.alpha > b.alpha);
  CHECK(b.alpha > c.alpha);
  CHECK(c.alpha > 0.0);
  CHECK(a.alpha < 1.0);
  CHECK_THROWS_AS(find_alpha_max(0.0, 0.04, cfg), DomainError);
}
