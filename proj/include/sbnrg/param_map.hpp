#pragma once

// Translation between the ohmic spin-boson parameters and the couplings of
// the equivalent anisotropic Kondo model. All energies are in units of the
// half bandwidth D0 = 1; the bath cutoff is fixed at wc = 2 D0.

#include <utility>

namespace sbnrg {

inline constexpr double kCutoff = 2.0; // wc in units of D0
inline constexpr double kMaxDeltaRatio = 0.1;

struct SpinBosonPoint {
  double alpha = 0.0;       // dissipation strength, 0 < alpha < 1
  double epsilon = 0.0;     // level asymmetry as the ratio eps / Delta
  double delta_ratio = 0.0; // Delta / wc
  double wc = kCutoff;

  /// Bare tunneling amplitude in D0 units.
  double delta() const { return delta_ratio * wc; }
  /// Absolute level asymmetry in D0 units.
  double epsilon_energy() const { return epsilon * delta(); }
};

/// Dimensionless Kondo couplings, flat band with rho0 = 1 / (2 D0).
struct KondoParams {
  double rho0_jperp = 0.0;
  double rho0_jpar = 0.0;
  double field = 0.0; // g muB h, acts on the impurity spin only
  double half_bandwidth = 1.0;
  bool transverse_warning = false; // set when rho0_jperp >= rho0_jpar

  double jperp() const { return 2.0 * half_bandwidth * rho0_jperp; }
  double jpar() const { return 2.0 * half_bandwidth * rho0_jpar; }
};

/// Throws DomainError if the point lies outside the supported sector.
void validate(const SpinBosonPoint &p);

KondoParams map_to_kondo(const SpinBosonPoint &p);

/// Scattering phase shift on the branch (-pi/2, 0).
double phase_shift_from_alpha(double alpha);
double rho0_jpar_from_alpha(double alpha);

/// Inverse relations: tan(delta) = -pi rho0 Jpar / 4, alpha = (1 + 2 delta / pi)^2.
double alpha_from_kondo(const KondoParams &k);

/// Point reconstructed from the couplings (alpha through the phase shift,
/// Delta/wc = rho0 Jperp, eps/Delta = h / Jperp).
SpinBosonPoint map_to_spin_boson(const KondoParams &k);

struct TunnelingScale {
  double value = 0.0; // Delta_r in D0 units
  bool underflow = false;
};

/// Delta_r = wc (Delta/wc)^(1/(1-alpha)).
TunnelingScale renormalized_tunneling(const SpinBosonPoint &p);
TunnelingScale renormalized_tunneling(double alpha, double delta_ratio,
                                      double wc = kCutoff);

/// alpha = 0 limit: (Delta, eps) / sqrt(eps^2 + Delta^2).
std::pair<double, double> noninteracting_reference(double delta, double epsilon);

} // namespace sbnrg
