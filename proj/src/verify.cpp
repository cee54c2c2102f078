#include "sbnrg/verify.hpp"

#include "sbnrg/ed_oracle.hpp"
#include "sbnrg/observables.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace sbnrg {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.passed; });
}

namespace {

KondoParams couplings(double rho0_jperp, double rho0_jpar, double field) {
  KondoParams k;
  k.rho0_jperp = rho0_jperp;
  k.rho0_jpar = rho0_jpar;
  k.field = field;
  return k;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

} // namespace

std::vector<KondoParams> oracle_coupling_sets() {
  return {
      couplings(0.04, 4.0 / 3.14159265358979, 0.0), // alpha = 0.25
      couplings(0.10, 0.50, 0.0),
      couplings(0.04, 0.1029, 0.008),
      couplings(0.30, 0.20, 0.05),
      couplings(0.08, 2.30, 0.30),
      couplings(0.02, 0.70, 0.10),
      couplings(0.25, 1.10, 0.70),
  };
}

VerifyReport verify(const NRGConfig &cfg, const VerifyOptions &options) {
  VerifyReport report;
  const auto chain = build_chain(cfg.lambda, ed::kMaxSites);

  {
    Check c{"oracle equivalence (untruncated NRG vs ED, 1-5 sites)", true, {}};
    double worst = 0.0;
    int cases = 0;
    for (const auto &k : oracle_coupling_sets()) {
      for (int sites = 1; sites <= ed::kMaxSites; ++sites) {
        const auto rep = ed::compare_with_nrg(k, chain, sites, {}, 1e-9, options.sabotage_sign_rule);
        worst = std::max({worst, rep.max_eigenvalue_deviation, rep.ox_deviation, rep.sz_deviation});
        c.passed = c.passed && rep.pass;
        ++cases;
      }
    }
    c.detail = std::to_string(cases) + " cases, max deviation " + sci(worst);
    report.checks.push_back(std::move(c));
  }

  {
    Check c{"single-site analytic ground energy -Jpar/4 - Jperp/2", true, {}};
    double worst = 0.0;
    for (auto k : oracle_coupling_sets()) {
      k.field = 0.0;
      const auto g = ed::exact_ground(k, chain, 1);
      worst = std::max(worst, std::abs(g.e0 - (-k.jpar() / 4.0 - k.jperp() / 2.0)));
    }
    c.passed = worst <= 1e-12;
    c.detail = "max deviation " + sci(worst);
    report.checks.push_back(std::move(c));
  }

  {
    Check c{"Hellmann-Feynman residual (ED, dj = 1e-4 Jperp)", true, {}};
    double worst = 0.0;
    for (const auto &k : oracle_coupling_sets()) {
      for (int sites = 1; sites <= 3; ++sites) {
        const auto hf = ed::hellmann_feynman_check(k, chain, sites);
        if (hf.degeneracy_changed) continue;
        worst = std::max(worst, hf.residual);
      }
    }
    c.passed = worst < 1e-8;
    c.detail = "max residual " + sci(worst);
    report.checks.push_back(std::move(c));
  }

  {
    Check c{"Wilson chain particle-hole symmetric spectrum", true, {}};
    const auto long_chain = build_chain(cfg.lambda, 40);
    const auto n = static_cast<Eigen::Index>(long_chain.length);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = long_chain.hop[i];
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(ev(i) + ev(n - 1 - i)));
    c.passed = worst <= 1e-12;
    c.detail = "max asymmetry " + sci(worst);
    report.checks.push_back(std::move(c));
  }

  {
    Check c{"entropy closed form vs 2x2 density matrix", true, {}};
    std::mt19937_64 rng(20031);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000;) {
      const double sx = u(rng), sz = u(rng);
      if (sx * sx + sz * sz > 1.0) continue;
      ++i;
      Eigen::Matrix2d rho;
      rho << 0.5 * (1 + sz), 0.5 * sx, 0.5 * sx, 0.5 * (1 - sz);
      const Eigen::Vector2d p = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(rho).eigenvalues();
      double direct = 0.0;
      for (double x : {p(0), p(1)})
        if (x > 0.0) direct -= x * std::log2(x);
      worst = std::max(worst, std::abs(direct - entanglement_entropy(sx, sz).entropy));
    }
    c.passed = worst <= 1e-12;
    c.detail = "max deviation " + sci(worst);
    report.checks.push_back(std::move(c));
  }

  {
    Check c{"spin-boson <-> Kondo round trip", true, {}};
    double worst = 0.0;
    for (double a = 0.01; a < 1.0; a += 0.01) {
      const auto k = map_to_kondo(SpinBosonPoint{a, 0.5, 0.04});
      worst = std::max(worst, std::abs(alpha_from_kondo(k) - a));
    }
    c.passed = worst <= 1e-12;
    c.detail = "max alpha deviation " + sci(worst);
    report.checks.push_back(std::move(c));
  }

  return report;
}

} // namespace sbnrg
