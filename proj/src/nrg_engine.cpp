#include "sbnrg/nrg_engine.hpp"

#include "sbnrg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sbnrg::nrg {

std::string Sector::label() const {
  return "(q=" + std::to_string(q) + ", 2Sz=" + std::to_string(two_sz) + ")";
}

namespace site {

std::optional<Transition> annihilate(Spin spin, int s) {
  if (spin == Spin::Up) {
    if (s == kUp) return Transition{kEmpty, 1.0};
    if (s == kDouble) return Transition{kDown, 1.0};
  } else {
    if (s == kDown) return Transition{kEmpty, 1.0};
    // f_dn f_up^dag f_dn^dag |0> = -f_up^dag |0>
    if (s == kDouble) return Transition{kUp, -1.0};
  }
  return std::nullopt;
}

std::optional<Transition> create(Spin spin, int s) {
  if (spin == Spin::Up) {
    if (s == kEmpty) return Transition{kUp, 1.0};
    if (s == kDown) return Transition{kDouble, 1.0};
  } else {
    if (s == kEmpty) return Transition{kDown, 1.0};
    if (s == kUp) return Transition{kDouble, -1.0};
  }
  return std::nullopt;
}

} // namespace site

namespace {

Sector shifted(const Sector &s, int site_state) {
  return {s.q + site::kCharge[site_state], s.two_sz + site::kTwoSz[site_state]};
}

// Sector reached from `s` by removing one electron of the given spin.
Sector after_annihilation(const Sector &s, Spin spin) {
  return {s.q - 1, s.two_sz + (spin == Spin::Up ? -1 : 1)};
}

double parity_sign(int electrons) { return (electrons % 2 == 0) ? 1.0 : -1.0; }

const ProductComponent *find_component(const std::vector<ProductComponent> &comps,
                                       const Sector &parent, int site_state) {
  for (const auto &c : comps)
    if (c.parent == parent && c.site_state == site_state) return &c;
  return nullptr;
}

struct Eigensystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

Eigensystem diagonalize(const Eigen::MatrixXd &h, const Sector &sector) {
  if (h.rows() == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw EigensolverError("eigensolver failed in sector " + sector.label() +
                           " of dimension " + std::to_string(h.rows()));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Spin flip P: P f_up^dag P = f_dn^dag, P^2 = 1. On a site, P|up dn> =
// f_dn^dag f_up^dag |0> = -|up dn>.
Sector mirrored(const Sector &s) { return {s.q, -s.two_sz}; }

int flipped_site(int s) {
  if (s == site::kUp) return site::kDown;
  if (s == site::kDown) return site::kUp;
  return s;
}

double site_flip_sign(int s) { return s == site::kDouble ? -1.0 : 1.0; }

// Parity of kept state r of a 2Sz = 0 parent sector.
using ParentParity = std::function<int(const Sector &, Eigen::Index)>;

struct RowImage {
  Eigen::Index row;
  double sign;
};

// P acting on each product-basis row of `comps`, expressed in the basis of
// `mirror_comps`. States of a 2Sz != 0 parent map onto the same index of the
// mirror parent (that is how mirror blocks are built); 2Sz = 0 parents are
// parity eigenstates.
std::vector<RowImage> flip_images(const std::vector<ProductComponent> &comps,
                                  const std::vector<ProductComponent> &mirror_comps,
                                  const ParentParity &parity) {
  Eigen::Index dim = 0;
  for (const auto &c : comps) dim += c.size;
  std::vector<RowImage> out(static_cast<std::size_t>(dim));
  for (const auto &c : comps) {
    const auto *m = find_component(mirror_comps, mirrored(c.parent), flipped_site(c.site_state));
    if (!m || m->size != c.size)
      throw std::logic_error("no spin-flip image for parent " + c.parent.label());
    for (Eigen::Index r = 0; r < c.size; ++r) {
      double sign = site_flip_sign(c.site_state);
      if (c.parent.two_sz == 0) sign *= parity(c.parent, r);
      out[static_cast<std::size_t>(c.offset + r)] = {m->offset + r, sign};
    }
  }
  return out;
}

struct ParityEigensystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<int> parity;
};

// Diagonalizes a 2Sz = 0 block separately in the even and odd subspaces of P,
// so every eigenvector is an exact parity eigenstate.
ParityEigensystem diagonalize_by_parity(const Eigen::MatrixXd &h,
                                        const std::vector<RowImage> &images,
                                        const Sector &sector) {
  const Eigen::Index dim = h.rows();
  const double r = std::sqrt(0.5);
  std::vector<std::pair<Eigen::Index, double>> even, odd; // (row, amplitude of partner)
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto &img = images[static_cast<std::size_t>(i)];
    if (img.row == i) {
      (img.sign > 0 ? even : odd).push_back({i, 0.0});
    } else if (i < img.row) {
      even.push_back({i, img.sign});
      odd.push_back({i, -img.sign});
    }
  }
  auto basis = [&](const std::vector<std::pair<Eigen::Index, double>> &cols) {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto [i, partner] = cols[k];
      const auto col = static_cast<Eigen::Index>(k);
      if (partner == 0.0) {
        u(i, col) = 1.0;
      } else {
        u(i, col) = r;
        u(images[static_cast<std::size_t>(i)].row, col) = partner * r;
      }
    }
    return u;
  };
  const Eigen::MatrixXd ue = basis(even);
  const Eigen::MatrixXd uo = basis(odd);
  const auto ee = diagonalize(ue.transpose() * h * ue, sector);
  const auto eo = diagonalize(uo.transpose() * h * uo, sector);

  const Eigen::Index ne = ue.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), 0);
  auto value = [&](Eigen::Index k) { return k < ne ? ee.values(k) : eo.values(k - ne); };
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return value(a) < value(b); });

  ParityEigensystem out;
  out.values.resize(dim);
  out.vectors.resize(dim, dim);
  out.parity.resize(static_cast<std::size_t>(dim));
  const Eigen::MatrixXd ve = ue * ee.vectors;
  const Eigen::MatrixXd vo = uo * eo.vectors;
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Eigen::Index k = order[static_cast<std::size_t>(c)];
    out.values(c) = value(k);
    out.vectors.col(c) = k < ne ? ve.col(k) : vo.col(k - ne);
    out.parity[static_cast<std::size_t>(c)] = k < ne ? 1 : -1;
  }
  return out;
}

// Diagonalizes every assembled block, subtracts the global ground energy and
// returns it (in the units of the assembled matrices). In a spin-flip
// symmetric run only 2Sz >= 0 blocks are assembled; the 2Sz < 0 blocks are
// their exact mirror images.
double finish_blocks(IterationState &out, std::map<Sector, Eigen::MatrixXd> &matrices,
                     Layout &layout, const ParentParity &parity) {
  double ground = std::numeric_limits<double>::infinity();
  for (auto &[sector, h] : matrices) {
    SectorBlock block;
    if (out.spin_flip_symmetric && sector.two_sz == 0) {
      const auto &comps = layout.at(sector);
      auto eig = diagonalize_by_parity(h, flip_images(comps, comps, parity), sector);
      block.energies = std::move(eig.values);
      block.vectors = std::move(eig.vectors);
      block.parity = std::move(eig.parity);
    } else {
      auto eig = diagonalize(h, sector);
      block.energies = std::move(eig.values);
      block.vectors = std::move(eig.vectors);
    }
    block.components = std::move(layout.at(sector));
    block.kept = block.energies.size();
    if (block.energies.size() > 0 && block.energies(0) < ground) {
      ground = block.energies(0);
      out.ground_sector = sector;
    }
    out.blocks.emplace(sector, std::move(block));
  }

  if (out.spin_flip_symmetric) {
    std::vector<Sector> sources;
    for (const auto &[sector, _] : out.blocks)
      if (sector.two_sz > 0) sources.push_back(sector);
    for (const Sector &sector : sources) {
      const SectorBlock &src = out.blocks.at(sector);
      const Sector target = mirrored(sector);
      const auto images = flip_images(src.components, layout.at(target), parity);
      SectorBlock m;
      m.energies = src.energies;
      m.kept = src.kept;
      m.vectors.resize(src.vectors.rows(), src.vectors.cols());
      for (std::size_t i = 0; i < images.size(); ++i)
        m.vectors.row(images[i].row) =
            images[i].sign * src.vectors.row(static_cast<Eigen::Index>(i));
      m.components = std::move(layout.at(target));
      out.blocks.emplace(target, std::move(m));
    }
  }

  for (auto &[sector, block] : out.blocks) block.energies.array() -= ground;
  return ground;
}

} // namespace

Eigen::Index IterationState::kept_total() const {
  Eigen::Index total = 0;
  for (const auto &[_, b] : blocks) total += b.kept;
  return total;
}

Eigen::Index IterationState::dim_total() const {
  Eigen::Index total = 0;
  for (const auto &[_, b] : blocks) total += b.dim();
  return total;
}

std::vector<double> IterationState::absolute_spectrum(bool kept_only) const {
  std::vector<double> out;
  const double w = scale();
  for (const auto &[_, b] : blocks) {
    const Eigen::Index n_states = kept_only ? b.kept : b.dim();
    for (Eigen::Index i = 0; i < n_states; ++i) out.push_back(e0 + w * b.energies(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> IterationState::rescaled_spectrum() const {
  std::vector<double> out;
  for (const auto &[_, b] : blocks)
    for (Eigen::Index i = 0; i < b.kept; ++i) out.push_back(b.energies(i));
  std::sort(out.begin(), out.end());
  return out;
}

IterationState init_impurity_site(const KondoParams &k, double lambda,
                                  EngineOptions options) {
  IterationState out;
  out.n = 0;
  out.lambda = lambda;
  out.options = options;
  out.spin_flip_symmetric = options.use_spin_flip_symmetry && k.field == 0.0;

  // Parents are the two impurity spin states, each a one-state "block".
  const Sector imp_up{0, 1};
  const Sector imp_dn{0, -1};

  Layout layout;
  for (const Sector &imp : {imp_up, imp_dn}) {
    for (int s = 0; s < site::kStates; ++s) {
      auto &comps = layout[shifted(imp, s)];
      const Eigen::Index offset = comps.empty() ? 0 : comps.back().offset + comps.back().size;
      comps.push_back({imp, s, offset, 1});
    }
  }

  const double jperp = k.jperp();
  const double jpar = k.jpar();
  std::map<Sector, Eigen::MatrixXd> matrices;
  for (const auto &[sector, comps] : layout) {
    if (out.spin_flip_symmetric && sector.two_sz < 0) continue;
    const auto dim = static_cast<Eigen::Index>(comps.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto &c : comps) {
      const double sz = 0.5 * c.parent.two_sz;
      const double local_sz2 = site::kTwoSz[c.site_state]; // n_up - n_dn
      h(c.offset, c.offset) = 0.5 * jpar * local_sz2 * sz + k.field * sz;
    }
    // (Jperp/2) f_up^dag f_dn S^- : |up imp, dn> -> |dn imp, up>, plus h.c.
    const auto *from = find_component(comps, imp_up, site::kDown);
    const auto *to = find_component(comps, imp_dn, site::kUp);
    if (from && to) {
      h(to->offset, from->offset) += 0.5 * jperp;
      h(from->offset, to->offset) += 0.5 * jperp;
    }
    matrices.emplace(sector, std::move(h));
  }

  // Matrices are in D0 units; rescale by 1 / w_0 = L^(-1/2).
  // Impurity parents have 2Sz = +-1, so no parity lookup happens here.
  const auto no_parity = [](const Sector &p, Eigen::Index) -> int {
    throw std::logic_error("unexpected parity lookup for " + p.label());
  };
  const double ground = finish_blocks(out, matrices, layout, no_parity);
  out.e0 = ground;
  const double inv_scale = 1.0 / out.scale();
  for (auto &[_, b] : out.blocks) b.energies *= inv_scale;
  return out;
}

Layout product_layout(const IterationState &s) {
  Layout layout;
  for (const auto &[parent, block] : s.blocks) {
    if (block.kept == 0) continue;
    for (int st = 0; st < site::kStates; ++st) {
      auto &comps = layout[shifted(parent, st)];
      const Eigen::Index offset = comps.empty() ? 0 : comps.back().offset + comps.back().size;
      comps.push_back({parent, st, offset, block.kept});
    }
  }
  return layout;
}

SiteOperator last_site_annihilator(const IterationState &s, Spin spin) {
  SiteOperator out;
  for (const auto &[source, src_block] : s.blocks) {
    if (src_block.kept == 0) continue;
    const Sector target = after_annihilation(source, spin);
    const auto it = s.blocks.find(target);
    if (it == s.blocks.end() || it->second.kept == 0) continue;
    const SectorBlock &dst_block = it->second;

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dst_block.kept, src_block.kept);
    for (const auto &c : src_block.components) {
      const auto t = site::annihilate(spin, c.site_state);
      if (!t) continue;
      const auto *c2 = find_component(dst_block.components, c.parent, t->state);
      if (!c2) continue;
      // The site operator passes the creators of the parent block, whose
      // electron count is q_parent + (sites of the parent iteration).
      const int parent_electrons = c.parent.q + s.n;
      double sign = parity_sign(parent_electrons);
      if (s.options.sabotage_sign_rule) sign = 1.0;
      m.noalias() += (t->amplitude * sign) *
                     dst_block.vectors.block(c2->offset, 0, c2->size, dst_block.kept).transpose() *
                     src_block.vectors.block(c.offset, 0, c.size, src_block.kept);
    }
    out.emplace(source, std::move(m));
  }
  return out;
}

Eigen::MatrixXd hopping_block(const IterationState &s,
                              const std::vector<ProductComponent> &components,
                              const SiteOperator &f_up, const SiteOperator &f_dn) {
  Eigen::Index dim = 0;
  for (const auto &c : components) dim += c.size;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

  for (const auto &c : components) {
    for (Spin spin : {Spin::Up, Spin::Down}) {
      // <r', s'| f_{N+1}^dag f_N |r, s> = (-1)^{n(r')} <s'|f^dag|s> <r'|f_N|r>
      const auto t = site::create(spin, c.site_state);
      if (!t) continue;
      const auto &f = spin == Spin::Up ? f_up : f_dn;
      const auto fit = f.find(c.parent);
      if (fit == f.end()) continue;
      const Sector parent2 = after_annihilation(c.parent, spin);
      const auto *c2 = find_component(components, parent2, t->state);
      if (!c2) continue;
      double sign = parity_sign(s.electrons(parent2));
      if (s.options.sabotage_sign_rule) sign = 1.0;
      const double amp = sign * t->amplitude;
      h.block(c2->offset, c.offset, c2->size, c.size) += amp * fit->second;
      h.block(c.offset, c2->offset, c.size, c2->size) += amp * fit->second.transpose();
    }
  }
  return h;
}

IterationState add_site(const IterationState &s, const WilsonChain &chain) {
  const auto hop_index = static_cast<std::size_t>(s.n);
  if (hop_index >= chain.length)
    throw DomainError("Wilson chain too short: iteration " + std::to_string(s.n + 1) +
                      " needs " + std::to_string(hop_index + 1) + " hoppings");

  const auto f_up = last_site_annihilator(s, Spin::Up);
  const auto f_dn = last_site_annihilator(s, Spin::Down);
  Layout layout = product_layout(s);

  const double sqrt_lambda = std::sqrt(s.lambda);
  // Rescaled hopping: Hbar_{N+1} = sqrt(L) Hbar_N + L^(N/2) t_N (f_{N+1}^dag f_N + h.c.)
  const double xi = chain.hop[hop_index] * std::pow(s.lambda, 0.5 * s.n);

  std::map<Sector, Eigen::MatrixXd> matrices;
  for (const auto &[sector, comps] : layout) {
    if (s.spin_flip_symmetric && sector.two_sz < 0) continue;
    Eigen::MatrixXd h = xi * hopping_block(s, comps, f_up, f_dn);
    for (const auto &c : comps) {
      const auto &parent = s.blocks.at(c.parent);
      h.diagonal().segment(c.offset, c.size) += sqrt_lambda * parent.energies.head(c.size);
    }
    matrices.emplace(sector, std::move(h));
  }

  IterationState out;
  out.n = s.n + 1;
  out.lambda = s.lambda;
  out.options = s.options;
  out.spin_flip_symmetric = s.spin_flip_symmetric;
  const auto parity = [&s](const Sector &p, Eigen::Index r) {
    return s.blocks.at(p).parity.at(static_cast<std::size_t>(r));
  };
  const double ground = finish_blocks(out, matrices, layout, parity);
  out.e0 = s.e0 + out.scale() * ground;
  return out;
}

IterationState truncate(IterationState s, std::size_t n_keep, double degeneracy_tol) {
  std::vector<double> all;
  for (const auto &[_, b] : s.blocks)
    for (Eigen::Index i = 0; i < b.kept; ++i) all.push_back(b.energies(i));
  if (all.size() <= n_keep) return s;

  std::sort(all.begin(), all.end());
  double cutoff = all[n_keep - 1];
  for (std::size_t i = n_keep; i < all.size(); ++i) {
    if (all[i] - cutoff > degeneracy_tol * std::max(1.0, std::abs(cutoff))) break;
    cutoff = all[i];
  }

  for (auto &[_, b] : s.blocks) {
    Eigen::Index kept = 0;
    while (kept < b.kept && b.energies(kept) <= cutoff) ++kept;
    b.kept = kept;
  }
  std::erase_if(s.blocks, [](const auto &kv) { return kv.second.kept == 0; });
  return s;
}

} // namespace sbnrg::nrg
