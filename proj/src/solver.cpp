#include "sbnrg/solver.hpp"

#include "sbnrg/calibration.hpp"
#include "sbnrg/errors.hpp"
#include "sbnrg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sbnrg {

void NRGConfig::validate() const {
  if (!(lambda > 1.0)) throw DomainError("lambda must be > 1");
  if (n_keep < 16) throw DomainError("n_keep must be >= 16");
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  if (!(plateau_tol > 0.0)) throw DomainError("plateau_tol must be > 0");
  if (!(degeneracy_tol > 0.0)) throw DomainError("degeneracy_tol must be > 0");
  if (plateau_window < 4) throw DomainError("plateau_window must be >= 4");
}

namespace {

struct PlateauCheck {
  bool reached = false;
  double drift = 0.0;
};

// Drift within the even and the odd subsequence over the last `window`
// iterations. Comparing N with N-2 keeps the even/odd alternation of NRG
// from masking a plateau.
PlateauCheck check_plateau(const std::vector<RawExpectation> &h, int window, double tol) {
  PlateauCheck out;
  const auto n = static_cast<int>(h.size());
  if (n < window) {
    out.drift = std::numeric_limits<double>::infinity();
    return out;
  }
  for (int i = n - window + 2; i < n; ++i) {
    out.drift = std::max(out.drift, std::abs(h[i].ox - h[i - 2].ox));
    out.drift = std::max(out.drift, std::abs(h[i].two_sz - h[i - 2].two_sz));
  }
  out.reached = out.drift < tol;
  return out;
}

} // namespace

RunResult run(const KondoParams &k, const NRGConfig &cfg, const RunOptions &options) {
  cfg.validate();
  if (!(k.rho0_jpar > 0.0))
    throw DomainError("rho0_jpar must be > 0 (antiferromagnetic sector)");

  const int n_final = options.stop_at.value_or(cfg.n_max);
  const auto chain = build_chain(cfg.lambda, static_cast<std::size_t>(std::max(n_final, 1)));
  const auto scale = renormalized_tunneling(alpha_from_kondo(k), k.rho0_jperp);

  RunResult r;
  r.report.delta_r = scale.value;
  r.report.delta_r_underflow = scale.underflow;

  KondoParams chain_k = k;
  if (cfg.calibrate_jpar)
    chain_k.rho0_jpar = calibrated_rho0_jpar(alpha_from_kondo(k), cfg.lambda);
  r.report.chain_rho0_jpar = chain_k.rho0_jpar;

  r.state = nrg::init_impurity_site(chain_k, cfg.lambda, options.engine);
  r.ops = init_operator_blocks(r.state);

  auto record = [&] {
    r.report.history.push_back(ground_expectation(r.state, r.ops, cfg.degeneracy_tol));
    if (options.record_levels > 0) {
      auto levels = r.state.rescaled_spectrum();
      levels.resize(std::min<std::size_t>(levels.size(), options.record_levels));
      r.report.levels.push_back(std::move(levels));
    }
  };
  record();

  while (r.state.n < n_final) {
    r.state = nrg::truncate(nrg::add_site(r.state, chain), cfg.n_keep, cfg.degeneracy_tol);
    r.ops = propagate(r.ops, r.state);
    record();

    const auto plateau = check_plateau(r.report.history, cfg.plateau_window, cfg.plateau_tol);
    r.report.drift = plateau.drift;
    r.report.plateau_reached = plateau.reached;
    r.report.scale_reached = r.state.scale() < cfg.eta * scale.value;
    if (!options.stop_at && r.report.scale_reached && r.report.plateau_reached) break;
  }

  r.report.n_m = r.state.n;
  r.report.converged = r.report.scale_reached && r.report.plateau_reached;

  const auto &h = r.report.history;
  r.raw = h.back();
  if (h.size() >= 2) {
    const auto &prev = h[h.size() - 2];
    if (std::abs(r.raw.ox - prev.ox) > cfg.plateau_tol ||
        std::abs(r.raw.two_sz - prev.two_sz) > cfg.plateau_tol) {
      r.raw.ox = 0.5 * (r.raw.ox + prev.ox);
      r.raw.two_sz = 0.5 * (r.raw.two_sz + prev.two_sz);
      r.report.even_odd_averaged = true;
    }
  }
  return r;
}

ObservableRecord run_point(const SpinBosonPoint &p, const NRGConfig &cfg) {
  const KondoParams k = map_to_kondo(p);
  const RunResult r = run(k, cfg);

  ObservableRecord rec;
  rec.alpha = p.alpha;
  rec.epsilon_over_delta = p.epsilon;
  rec.delta_ratio = p.delta_ratio;
  const auto spin = to_reported(r.raw);
  rec.sx = spin.sx;
  rec.sz = spin.sz;
  rec.sy = 0.0;
  const auto ent = entanglement_entropy(spin.sx, spin.sz);
  rec.norm = ent.norm;
  rec.p_plus = ent.p_plus;
  rec.p_minus = ent.p_minus;
  rec.entropy = ent.entropy;
  rec.delta_r = r.report.delta_r;
  rec.e0 = r.state.e0;
  rec.n_m = r.report.n_m;
  rec.converged = r.report.converged;
  rec.lambda = cfg.lambda;
  rec.n_keep = cfg.n_keep;
  rec.drift = r.report.drift;
  rec.even_odd_averaged = r.report.even_odd_averaged;
  rec.delta_r_underflow = r.report.delta_r_underflow;
  rec.transverse_warning = k.transverse_warning;
  return rec;
}

AlphaMax find_alpha_max(double epsilon_over_delta, double delta_ratio, const NRGConfig &cfg,
                        unsigned jobs, double tolerance) {
  if (!(epsilon_over_delta > 0.0))
    throw DomainError("alpha-max needs eps/Delta > 0; at eps = 0 the entropy grows "
                      "monotonically with alpha");

  auto entropy_at = [&](double alpha) {
    SpinBosonPoint p;
    p.alpha = alpha;
    p.epsilon = epsilon_over_delta;
    p.delta_ratio = delta_ratio;
    return run_point(p, cfg).entropy;
  };

  const auto coarse = parallel_map<double>(kCoarseAlphaGrid.size(), jobs, [&](std::size_t i) {
    return entropy_at(kCoarseAlphaGrid[i]);
  });
  std::map<double, double> cache;
  for (std::size_t i = 0; i < coarse.size(); ++i) cache[kCoarseAlphaGrid[i]] = coarse[i];

  auto lookup = [&](double alpha) {
    if (auto it = cache.find(alpha); it != cache.end()) return it->second;
    return cache[alpha] = entropy_at(alpha);
  };
  auto result = maximize_entropy(lookup, kCoarseAlphaGrid, tolerance);
  if (!(result.alpha > 0.0 && result.alpha < 1.0))
    throw std::runtime_error("alpha_M outside (0, 1)");
  return result;
}

} // namespace sbnrg
