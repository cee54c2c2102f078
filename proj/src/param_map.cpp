#include "sbnrg/param_map.hpp"

#include "sbnrg/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sbnrg {

namespace {

std::string fmt_value(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("unsupported dissipation sector: alpha = " + fmt_value(alpha) +
                      " (need 0 < alpha < 1)");
}

} // namespace

void validate(const SpinBosonPoint &p) {
  check_alpha(p.alpha);
  if (!(p.delta_ratio > 0.0 && p.delta_ratio <= kMaxDeltaRatio))
    throw DomainError("delta_ratio = " + fmt_value(p.delta_ratio) +
                      " outside (0, 0.1]");
  if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon))
    throw DomainError("eps/Delta = " + fmt_value(p.epsilon) + " must be finite and >= 0");
  if (p.wc != kCutoff)
    throw DomainError("cutoff wc is fixed at 2 D0");
}

double phase_shift_from_alpha(double alpha) {
  check_alpha(alpha);
  return 0.5 * std::numbers::pi * (std::sqrt(alpha) - 1.0);
}

double rho0_jpar_from_alpha(double alpha) {
  return -(4.0 / std::numbers::pi) * std::tan(phase_shift_from_alpha(alpha));
}

KondoParams map_to_kondo(const SpinBosonPoint &p) {
  validate(p);
  KondoParams k;
  k.rho0_jpar = rho0_jpar_from_alpha(p.alpha);
  k.rho0_jperp = p.delta_ratio;
  k.field = p.epsilon_energy();
  k.transverse_warning = k.rho0_jperp >= k.rho0_jpar;
  return k;
}

double alpha_from_kondo(const KondoParams &k) {
  const double delta = std::atan(-std::numbers::pi * k.rho0_jpar / 4.0);
  const double a = 1.0 + 2.0 * delta / std::numbers::pi;
  return a * a;
}

SpinBosonPoint map_to_spin_boson(const KondoParams &k) {
  SpinBosonPoint p;
  p.alpha = alpha_from_kondo(k);
  p.delta_ratio = k.rho0_jperp;
  p.epsilon = k.jperp() > 0.0 ? k.field / k.jperp() : 0.0;
  return p;
}

TunnelingScale renormalized_tunneling(double alpha, double delta_ratio, double wc) {
  check_alpha(alpha);
  TunnelingScale out;
  out.value = wc * std::pow(delta_ratio, 1.0 / (1.0 - alpha));
  if (!(out.value >= std::numeric_limits<double>::min())) {
    out.value = std::max(out.value, std::numeric_limits<double>::denorm_min());
    out.underflow = true;
  }
  return out;
}

TunnelingScale renormalized_tunneling(const SpinBosonPoint &p) {
  return renormalized_tunneling(p.alpha, p.delta_ratio, p.wc);
}

std::pair<double, double> noninteracting_reference(double delta, double epsilon) {
  const double r = std::hypot(epsilon, delta);
  return {delta / r, epsilon / r};
}

} // namespace sbnrg
