#pragma once

// Brute-force exact diagonalization of the impurity plus a short Wilson
// chain in the full Fock space. Used to certify the NRG engine.
//
// A basis state is a bit string: bit 2*site + spin holds the occupation of
// mode (site, spin) with spin up = 0, down = 1; bit 2*sites holds the
// impurity spin (1 = up). Fermionic modes are ordered by site, then spin,
// and the impurity carries no fermion number.

#include "sbnrg/param_map.hpp"
#include "sbnrg/wilson_chain.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace sbnrg::ed {

inline constexpr int kMaxSites = 5;

struct FockBasis {
  int sites = 0;

  std::size_t size() const { return std::size_t{2} << (2 * sites); }
  int modes() const { return 2 * sites; }
  std::uint32_t impurity_bit() const { return std::uint32_t{1} << modes(); }

  int charge(std::uint32_t state) const;  // electrons - sites
  int two_sz(std::uint32_t state) const;  // impurity + band
};

FockBasis make_basis(int sites);

struct Image {
  std::uint32_t state;
  double sign;
};

/// c_mode^dag |state> and c_mode |state> with Jordan-Wigner signs.
std::optional<Image> apply_create(const FockBasis &basis, int mode, std::uint32_t state);
std::optional<Image> apply_annihilate(const FockBasis &basis, int mode, std::uint32_t state);

inline int mode_index(int site, int spin) { return 2 * site + spin; }

/// Dense matrices on the full Fock space.
Eigen::MatrixXd creation_matrix(const FockBasis &basis, int mode);
Eigen::MatrixXd hamiltonian(const KondoParams &k, const WilsonChain &chain, int sites);
/// Nearest-neighbour hopping between sites `a` and `a+1`, both spins, unit amplitude.
Eigen::MatrixXd hopping_matrix(const FockBasis &basis, int a);
Eigen::MatrixXd ox_matrix(const FockBasis &basis); // c0up^dag c0dn S^- + h.c.
Eigen::MatrixXd sz_matrix(const FockBasis &basis); // impurity S_z

struct Spectrum {
  std::vector<double> energies; // ascending
  double e0 = 0.0;
  double ox = 0.0;     // ground multiplet average
  double two_sz = 0.0; // ground multiplet average of 2 S_z
  int degeneracy = 0;
};

/// Full spectrum, diagonalized per (charge, 2Sz) block.
Spectrum solve(const KondoParams &k, const WilsonChain &chain, int sites,
               double degeneracy_tol = 1e-9);

struct GroundState {
  double e0 = 0.0;
  double sx_raw = 0.0;
  double sz_raw = 0.0;
  int degeneracy = 0;
};

/// Throws DomainError for sites > kMaxSites.
GroundState exact_ground(const KondoParams &k, const WilsonChain &chain, int sites);

struct HellmannFeynmanResult {
  double residual = 0.0;
  double correlator = 0.0;  // <ox>
  double derivative = 0.0;  // [E0(J+dj) - E0(J-dj)] / dj
  bool degeneracy_changed = false;
};

/// |<ox> - [E0(Jperp + dj) - E0(Jperp - dj)] / dj|; dj defaults to 1e-4 Jperp.
HellmannFeynmanResult hellmann_feynman_check(const KondoParams &k, const WilsonChain &chain,
                                             int sites, std::optional<double> dj = {});

struct ComparisonReport {
  int sites = 0;
  std::size_t levels_compared = 0;
  double max_eigenvalue_deviation = 0.0;
  double ox_deviation = 0.0;
  double sz_deviation = 0.0;
  bool truncated = false;
  bool pass = false;
};

/// Runs the NRG engine on the same finite chain (untruncated unless
/// n_keep is given) and compares spectra and raw observables; passes iff
/// every deviation is <= tol.
ComparisonReport compare_with_nrg(const KondoParams &k, const WilsonChain &chain, int sites,
                                  std::optional<std::size_t> n_keep = {}, double tol = 1e-9,
                                  bool sabotage_sign_rule = false);

} // namespace sbnrg::ed
