#pragma once

// Full NRG runs: iterate, truncate, propagate the impurity operators and
// stop once the energy scale has undercut Delta_r and the observables no
// longer move.

#include "sbnrg/config.hpp"
#include "sbnrg/observables.hpp"

#include <optional>
#include <vector>

namespace sbnrg {

struct RunOptions {
  /// Iterate exactly up to this N, ignoring the stopping rule.
  std::optional<int> stop_at;
  /// Keep the lowest this many rescaled levels of every iteration.
  int record_levels = 0;
  nrg::EngineOptions engine;
};

struct ConvergenceReport {
  int n_m = 0;
  bool scale_reached = false; // w_N < eta * Delta_r
  bool plateau_reached = false;
  bool converged = false;
  bool even_odd_averaged = false;
  double drift = 0.0; // max drift of sx, sz over the last window (even/odd resolved)
  double delta_r = 0.0;
  bool delta_r_underflow = false;
  double chain_rho0_jpar = 0.0; // longitudinal coupling actually put on the chain
  std::vector<RawExpectation> history; // index = iteration
  std::vector<std::vector<double>> levels;
};

struct RunResult {
  nrg::IterationState state;
  OperatorBlocks ops;
  ConvergenceReport report;
  RawExpectation raw; // final values, even/odd averaged when flagged
};

RunResult run(const KondoParams &k, const NRGConfig &cfg, const RunOptions &options = {});

struct ObservableRecord {
  double alpha = 0.0;
  double epsilon_over_delta = 0.0;
  double delta_ratio = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double sz = 0.0;
  double norm = 0.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double entropy = 0.0;
  double delta_r = 0.0;
  double e0 = 0.0;
  int n_m = 0;
  bool converged = false;
  double lambda = 0.0;
  std::size_t n_keep = 0;
  double drift = 0.0;
  bool even_odd_averaged = false;
  bool delta_r_underflow = false;
  bool transverse_warning = false;

  bool operator==(const ObservableRecord &) const = default;
};

ObservableRecord run_point(const SpinBosonPoint &p, const NRGConfig &cfg);

// alpha_M moves towards 0 as eps grows (about 0.15 at eps = Delta / 2), so
// the scan starts well below 0.1.
inline const std::vector<double> kCoarseAlphaGrid = {
    0.01, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45,
    0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};

/// Entanglement maximum over alpha at fixed eps/Delta > 0 and Delta/wc.
AlphaMax find_alpha_max(double epsilon_over_delta, double delta_ratio, const NRGConfig &cfg,
                        unsigned jobs = 1, double tolerance = 0.01);

} // namespace sbnrg
