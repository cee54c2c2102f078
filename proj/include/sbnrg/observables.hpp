#pragma once

#include "sbnrg/nrg_engine.hpp"

#include <functional>
#include <map>

namespace sbnrg {

/// Local impurity operators in the eigenbasis of one iteration:
///   ox = f_0up^dag f_0dn S^- + h.c.,  oz = S_z (impurity).
/// Both conserve charge and total S_z, so they are stored per sector.
struct OperatorBlocks {
  std::map<nrg::Sector, Eigen::MatrixXd> ox;
  std::map<nrg::Sector, Eigen::MatrixXd> oz;
  int iteration = 0;
};

OperatorBlocks init_operator_blocks(const nrg::IterationState &initial);

/// Rotates a sector-diagonal, fermion-even operator from the kept basis of
/// iteration N into the kept basis of `next` (iteration N+1).
std::map<nrg::Sector, Eigen::MatrixXd>
propagate_operator(const std::map<nrg::Sector, Eigen::MatrixXd> &op,
                   const nrg::IterationState &next);

OperatorBlocks propagate(const OperatorBlocks &ops, const nrg::IterationState &next);

/// Ground-state expectation values before sign conventions are applied.
struct RawExpectation {
  double ox = 0.0;     // <f_0up^dag f_0dn S^- + h.c.>
  double two_sz = 0.0; // <2 S_z>
  int degeneracy = 1;
};

/// Averages over every kept state within `degeneracy_tol` of the ground state.
RawExpectation ground_expectation(const nrg::IterationState &state,
                                  const OperatorBlocks &ops, double degeneracy_tol);

// With H = +Delta/2 sigma_x + eps/2 sigma_z and J's > 0, the raw correlators
// come out negative. Reported values flip both so that sigma_x -> +1 for
// alpha -> 0 and sigma_z -> +1 for eps > 0, alpha -> 1.
inline constexpr double kSigmaXSign = -1.0;
inline constexpr double kSigmaZSign = -1.0;
inline constexpr const char *kSignConventionNote =
    "sx = -<f0up^dag f0dn S^- + h.c.>, sz = -<2 S_z>, sy = 0; chosen so that "
    "sx -> +1 as alpha -> 0 and sz -> +1 for eps > 0 as alpha -> 1";

struct SpinExpectation {
  double sx = 0.0;
  double sz = 0.0;
};

/// Reported (sx, sz). Throws NotConvergedError for an unconverged run unless
/// `allow_unconverged` is set.
SpinExpectation expectation_values(const nrg::IterationState &state, const OperatorBlocks &ops,
                                   bool converged, bool allow_unconverged,
                                   double degeneracy_tol = 1e-10);

inline SpinExpectation to_reported(const RawExpectation &raw) {
  return {kSigmaXSign * raw.ox, kSigmaZSign * raw.two_sz};
}

struct Entanglement {
  double p_plus = 1.0;
  double p_minus = 0.0;
  double entropy = 0.0; // bits
  double norm = 1.0;
};

/// p+- = (1 +- |<sigma>|) / 2 and E = -sum p log2 p.
Entanglement entanglement_entropy(double sx, double sz);

struct AlphaMax {
  double alpha = 0.0;
  double entropy = 0.0;
  int evaluations = 0;
};

/// Interior maximizer of `entropy_of_alpha`: coarse scan over `grid`, then
/// golden-section refinement of the bracketing interval down to `tolerance`.
/// Throws std::runtime_error when the grid maximum sits on an end point.
AlphaMax maximize_entropy(const std::function<double(double)> &entropy_of_alpha,
                          const std::vector<double> &grid, double tolerance = 0.01);

} // namespace sbnrg
