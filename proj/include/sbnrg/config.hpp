#pragma once

#include <cstddef>

namespace sbnrg {

struct NRGConfig {
  double lambda = 2.0;
  std::size_t n_keep = 300;
  int n_max = 300;
  double eta = 1e-2; // stop once w_N < eta * Delta_r
  double plateau_tol = 1e-6;
  double degeneracy_tol = 1e-10;
  int plateau_window = 4;
  /// Tune rho0 Jpar so the discretized chain has the continuum spin-flip
  /// exponent alpha (see calibration.hpp).
  bool calibrate_jpar = true;

  /// Lambda = 1.5 and 1200 kept states.
  static NRGConfig paper_fidelity() {
    NRGConfig cfg;
    cfg.lambda = 1.5;
    cfg.n_keep = 1200;
    return cfg;
  }

  /// Throws DomainError on an invalid combination.
  void validate() const;
};

} // namespace sbnrg
