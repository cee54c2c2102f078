#include "sbnrg/ed_oracle.hpp"

#include "sbnrg/errors.hpp"
#include "sbnrg/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace sbnrg::ed {

namespace {

constexpr int kUp = 0;
constexpr int kDn = 1;

std::uint32_t mode_bit(int mode) { return std::uint32_t{1} << mode; }

double jw_sign(std::uint32_t state, int mode) {
  return (std::popcount(state & (mode_bit(mode) - 1)) % 2 == 0) ? 1.0 : -1.0;
}

} // namespace

int FockBasis::charge(std::uint32_t state) const {
  return std::popcount(state & (impurity_bit() - 1)) - sites;
}

int FockBasis::two_sz(std::uint32_t state) const {
  int s = (state & impurity_bit()) ? 1 : -1;
  for (int site = 0; site < sites; ++site) {
    if (state & mode_bit(mode_index(site, kUp))) ++s;
    if (state & mode_bit(mode_index(site, kDn))) --s;
  }
  return s;
}

FockBasis make_basis(int sites) {
  if (sites < 1 || sites > kMaxSites)
    throw DomainError("exact diagonalization supports 1.." + std::to_string(kMaxSites) +
                      " sites, got " + std::to_string(sites));
  return FockBasis{sites};
}

std::optional<Image> apply_create(const FockBasis &basis, int mode, std::uint32_t state) {
  (void)basis;
  if (state & mode_bit(mode)) return std::nullopt;
  return Image{state | mode_bit(mode), jw_sign(state, mode)};
}

std::optional<Image> apply_annihilate(const FockBasis &basis, int mode, std::uint32_t state) {
  (void)basis;
  if (!(state & mode_bit(mode))) return std::nullopt;
  return Image{state & ~mode_bit(mode), jw_sign(state, mode)};
}

Eigen::MatrixXd creation_matrix(const FockBasis &basis, int mode) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t s = 0; s < basis.size(); ++s)
    if (auto img = apply_create(basis, mode, s)) m(img->state, s) += img->sign;
  return m;
}

namespace {

// Adds amp * c_to^dag c_from (+ h.c. if requested) to m.
void add_bilinear(Eigen::MatrixXd &m, const FockBasis &basis, int to, int from, double amp) {
  for (std::uint32_t s = 0; s < basis.size(); ++s) {
    const auto a = apply_annihilate(basis, from, s);
    if (!a) continue;
    const auto c = apply_create(basis, to, a->state);
    if (!c) continue;
    m(c->state, s) += amp * a->sign * c->sign;
  }
}

} // namespace

Eigen::MatrixXd hopping_matrix(const FockBasis &basis, int a) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int spin : {kUp, kDn}) {
    add_bilinear(m, basis, mode_index(a + 1, spin), mode_index(a, spin), 1.0);
    add_bilinear(m, basis, mode_index(a, spin), mode_index(a + 1, spin), 1.0);
  }
  return m;
}

Eigen::MatrixXd ox_matrix(const FockBasis &basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  const auto imp = basis.impurity_bit();
  for (std::uint32_t s = 0; s < basis.size(); ++s) {
    // c0up^dag c0dn S^- acts on impurity-up states; its conjugate on impurity-down.
    const bool imp_up = s & imp;
    const int from = mode_index(0, imp_up ? kDn : kUp);
    const int to = mode_index(0, imp_up ? kUp : kDn);
    const auto a = apply_annihilate(basis, from, s);
    if (!a) continue;
    const auto c = apply_create(basis, to, a->state);
    if (!c) continue;
    m(c->state ^ imp, s) += a->sign * c->sign;
  }
  return m;
}

Eigen::MatrixXd sz_matrix(const FockBasis &basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t s = 0; s < basis.size(); ++s)
    m(s, s) = (s & basis.impurity_bit()) ? 0.5 : -0.5;
  return m;
}

Eigen::MatrixXd hamiltonian(const KondoParams &k, const WilsonChain &chain, int sites) {
  const FockBasis basis = make_basis(sites);
  if (static_cast<std::size_t>(sites - 1) > chain.length)
    throw DomainError("Wilson chain shorter than requested site count");

  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n + 1 < sites; ++n) h += chain.hop[n] * hopping_matrix(basis, n);

  h += 0.5 * k.jperp() * ox_matrix(basis);

  const Eigen::MatrixXd sz = sz_matrix(basis);
  for (std::uint32_t s = 0; s < basis.size(); ++s) {
    const double n_up = (s & mode_bit(mode_index(0, kUp))) ? 1.0 : 0.0;
    const double n_dn = (s & mode_bit(mode_index(0, kDn))) ? 1.0 : 0.0;
    h(s, s) += 0.5 * k.jpar() * (n_up - n_dn) * sz(s, s) + k.field * sz(s, s);
  }
  return h;
}

Spectrum solve(const KondoParams &k, const WilsonChain &chain, int sites,
               double degeneracy_tol) {
  const FockBasis basis = make_basis(sites);
  const Eigen::MatrixXd h = hamiltonian(k, chain, sites);
  const Eigen::MatrixXd ox = ox_matrix(basis);
  const Eigen::MatrixXd sz = sz_matrix(basis);

  std::map<std::pair<int, int>, std::vector<Eigen::Index>> sectors;
  for (std::uint32_t s = 0; s < basis.size(); ++s)
    sectors[{basis.charge(s), basis.two_sz(s)}].push_back(s);

  struct Level {
    double energy;
    double ox;
    double sz;
  };
  std::vector<Level> levels;
  levels.reserve(basis.size());
  for (const auto &[label, idx] : sectors) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd hb(n, n), oxb(n, n), szb(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        hb(i, j) = h(idx[i], idx[j]);
        oxb(i, j) = ox(idx[i], idx[j]);
        szb(i, j) = sz(idx[i], idx[j]);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hb);
    if (es.info() != Eigen::Success)
      throw EigensolverError("exact diagonalization failed in sector q=" +
                             std::to_string(label.first) + ", 2Sz=" + std::to_string(label.second));
    const auto &v = es.eigenvectors();
    for (Eigen::Index i = 0; i < n; ++i)
      levels.push_back({es.eigenvalues()(i), v.col(i).dot(oxb * v.col(i)),
                        v.col(i).dot(szb * v.col(i))});
  }
  std::sort(levels.begin(), levels.end(),
            [](const Level &a, const Level &b) { return a.energy < b.energy; });

  Spectrum out;
  out.e0 = levels.front().energy;
  for (const auto &l : levels) {
    out.energies.push_back(l.energy);
    if (l.energy - out.e0 <= degeneracy_tol * std::max(1.0, std::abs(out.e0))) {
      out.ox += l.ox;
      out.two_sz += 2.0 * l.sz;
      ++out.degeneracy;
    }
  }
  out.ox /= out.degeneracy;
  out.two_sz /= out.degeneracy;
  return out;
}

GroundState exact_ground(const KondoParams &k, const WilsonChain &chain, int sites) {
  const auto sp = solve(k, chain, sites);
  return {sp.e0, sp.ox, sp.two_sz, sp.degeneracy};
}

HellmannFeynmanResult hellmann_feynman_check(const KondoParams &k, const WilsonChain &chain,
                                             int sites, std::optional<double> dj) {
  const double step = dj.value_or(1e-4 * k.jperp());
  // Jperp = 2 rho0 Jperp in D0 units.
  KondoParams plus = k, minus = k;
  plus.rho0_jperp += 0.5 * step;
  minus.rho0_jperp -= 0.5 * step;

  const auto centre = solve(k, chain, sites);
  const auto sp = solve(plus, chain, sites);
  const auto sm = solve(minus, chain, sites);

  HellmannFeynmanResult r;
  r.correlator = centre.ox;
  r.derivative = (sp.e0 - sm.e0) / step;
  r.residual = std::abs(r.correlator - r.derivative);
  r.degeneracy_changed =
      sp.degeneracy != centre.degeneracy || sm.degeneracy != centre.degeneracy;
  return r;
}

ComparisonReport compare_with_nrg(const KondoParams &k, const WilsonChain &chain, int sites,
                                  std::optional<std::size_t> n_keep, double tol,
                                  bool sabotage_sign_rule) {
  const auto exact = solve(k, chain, sites);

  nrg::EngineOptions opts;
  opts.sabotage_sign_rule = sabotage_sign_rule;
  auto state = nrg::init_impurity_site(k, chain.lambda, opts);
  auto ops = init_operator_blocks(state);
  while (state.sites() < sites) {
    state = nrg::add_site(state, chain);
    if (n_keep) state = nrg::truncate(std::move(state), *n_keep, 1e-10);
    ops = propagate(ops, state);
  }
  const auto raw = ground_expectation(state, ops, 1e-10);
  const auto levels = state.absolute_spectrum(/*kept_only=*/true);

  ComparisonReport rep;
  rep.sites = sites;
  rep.truncated = levels.size() < exact.energies.size();
  rep.levels_compared = std::min(levels.size(), exact.energies.size());
  for (std::size_t i = 0; i < rep.levels_compared; ++i)
    rep.max_eigenvalue_deviation =
        std::max(rep.max_eigenvalue_deviation, std::abs(levels[i] - exact.energies[i]));
  rep.ox_deviation = std::abs(raw.ox - exact.ox);
  rep.sz_deviation = std::abs(raw.two_sz - exact.two_sz);
  rep.pass = !rep.truncated && rep.max_eigenvalue_deviation <= tol &&
             rep.ox_deviation <= tol && rep.sz_deviation <= tol;
  return rep;
}

} // namespace sbnrg::ed
