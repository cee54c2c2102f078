#pragma once

// Longitudinal coupling on a discretized band.
//
// At Jperp = 0 the impurity spin is frozen and each spin channel sees a
// potential +-Jpar/4 on site 0. The spin-flip operator f0up^dag f0dn S^-
// then connects two Fermi seas, and its matrix element between the lowest
// states decays as w_N^x. On a continuous band x = alpha. On a Wilson chain
// x drifts upwards with Lambda (about 0.3135 instead of 0.3 at Lambda = 2),
// which moves every alpha-dependent observable by several percent.
// Choosing rho0 Jpar so the chain reproduces x = alpha removes that drift.

namespace sbnrg {

/// Spin-flip exponent x of the Jperp = 0 chain at this Lambda and rho0 Jpar,
/// from the matrix elements at the fixed point.
double flip_exponent(double lambda, double rho0_jpar);

/// rho0 Jpar for which flip_exponent(lambda, .) == alpha, alpha in (0, 1).
double calibrated_rho0_jpar(double alpha, double lambda);

} // namespace sbnrg
