#pragma once

// Iterative diagonalization of the Wilson chain coupled to a Kondo impurity.
//
// Internal Hamiltonians are rescaled, Hbar_N = L^((N-1)/2) H_N, and each
// iteration stores its spectrum relative to the ground state. The subtracted
// shifts are accumulated unscaled in IterationState::e0.
//
// Fermion ordering: creators of older sites stand to the left of newer ones,
// and within a site spin up precedes spin down. A product state |r, s> of
// an old eigenstate r and a new-site configuration s therefore picks up
// (-1)^(electrons in r) whenever a new-site operator is moved past the old
// block. Every state of a sector has the same electron number, so this is a
// per-block sign.

#include "sbnrg/param_map.hpp"
#include "sbnrg/wilson_chain.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sbnrg::nrg {

/// Conserved quantum numbers: charge relative to half filling and twice
/// the total spin projection (impurity included).
struct Sector {
  int q = 0;
  int two_sz = 0;

  auto operator<=>(const Sector &) const = default;
  std::string label() const;
};

enum class Spin { Up, Down };

namespace site {

inline constexpr int kEmpty = 0;
inline constexpr int kUp = 1;     // f_up^dag |0>
inline constexpr int kDown = 2;   // f_dn^dag |0>
inline constexpr int kDouble = 3; // f_up^dag f_dn^dag |0>
inline constexpr int kStates = 4;

inline constexpr int kCharge[kStates] = {-1, 0, 0, 1};
inline constexpr int kTwoSz[kStates] = {0, 1, -1, 0};
inline constexpr int kOccupancy[kStates] = {0, 1, 1, 2};

struct Transition {
  int state;
  double amplitude;
};

/// f_sigma |s>, if nonzero.
std::optional<Transition> annihilate(Spin spin, int s);
/// f_sigma^dag |s>, if nonzero.
std::optional<Transition> create(Spin spin, int s);

} // namespace site

/// Contiguous slice of a sector's product basis: the kept states of one
/// parent sector tensored with one new-site configuration.
struct ProductComponent {
  Sector parent;
  int site_state = 0;
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
};

struct SectorBlock {
  std::vector<ProductComponent> components;
  Eigen::VectorXd energies; // ascending, rescaled, relative to the global ground state
  Eigen::MatrixXd vectors;  // columns: eigenvectors in the product basis
  Eigen::Index kept = 0;
  // Spin-flip parity (+1/-1) of each eigenstate; only filled for 2Sz = 0
  // sectors of a spin-flip symmetric run.
  std::vector<int> parity;

  Eigen::Index dim() const { return energies.size(); }
};

struct EngineOptions {
  /// At zero field, build 2Sz < 0 sectors as exact mirror images of 2Sz > 0
  /// and split 2Sz = 0 sectors by spin-flip parity.
  bool use_spin_flip_symmetry = true;
  /// Test hook: drop the fermionic parity signs. Never set in production runs.
  bool sabotage_sign_rule = false;
};

struct IterationState {
  int n = 0; // iteration index; sites 0..n are present
  std::map<Sector, SectorBlock> blocks;
  double e0 = 0.0; // ground energy of H_N in D0 units
  double lambda = 2.0;
  Sector ground_sector;
  EngineOptions options;
  bool spin_flip_symmetric = false;

  int sites() const { return n + 1; }
  double scale() const { return energy_scale(lambda, n); }
  /// Electron count of any state in sector `s` at this iteration.
  int electrons(const Sector &s) const { return s.q + sites(); }

  Eigen::Index kept_total() const;
  Eigen::Index dim_total() const;

  /// Sorted eigenvalues of H_N in D0 units (all states, or kept ones only).
  std::vector<double> absolute_spectrum(bool kept_only = false) const;
  /// Sorted rescaled energies of the kept states.
  std::vector<double> rescaled_spectrum() const;
};

using Layout = std::map<Sector, std::vector<ProductComponent>>;
/// Per source sector: matrix of f_{N,sigma} from kept states of the source
/// sector (columns) to kept states of the target sector (rows).
using SiteOperator = std::map<Sector, Eigen::MatrixXd>;

/// H_0: impurity spin and site 0 with the Kondo exchange and the Zeeman
/// term, diagonalized per sector.
IterationState init_impurity_site(const KondoParams &k, double lambda,
                                  EngineOptions options = {});

/// Product basis of (kept states of `s`) x (4 site states), grouped by sector.
Layout product_layout(const IterationState &s);

/// Matrix elements of f_{N,sigma} for the newest site of `s`, kept states only.
SiteOperator last_site_annihilator(const IterationState &s, Spin spin);

/// Sum over spin of f_{N+1}^dag f_N + h.c. on one product-basis sector
/// (unit hopping amplitude).
Eigen::MatrixXd hopping_block(const IterationState &s,
                              const std::vector<ProductComponent> &components,
                              const SiteOperator &f_up, const SiteOperator &f_dn);

/// One NRG step: couple site n+1 and diagonalize Hbar_{N+1}.
IterationState add_site(const IterationState &s, const WilsonChain &chain);

/// Keep the globally lowest n_keep states, extended to close a degenerate
/// multiplet straddling the cutoff.
IterationState truncate(IterationState s, std::size_t n_keep, double degeneracy_tol);

} // namespace sbnrg::nrg
