#include "sbnrg/observables.hpp"

#include "sbnrg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbnrg {

using nrg::Sector;

OperatorBlocks init_operator_blocks(const nrg::IterationState &initial) {
  if (initial.n != 0)
    throw std::invalid_argument("init_operator_blocks expects the iteration-0 state");

  const Sector imp_up{0, 1};
  const Sector imp_dn{0, -1};

  OperatorBlocks ops;
  ops.iteration = 0;
  for (const auto &[sector, block] : initial.blocks) {
    const Eigen::Index dim = block.dim();
    Eigen::MatrixXd ox = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd oz = Eigen::MatrixXd::Zero(dim, dim);
    const nrg::ProductComponent *flip_from = nullptr;
    const nrg::ProductComponent *flip_to = nullptr;
    for (const auto &c : block.components) {
      oz(c.offset, c.offset) = 0.5 * c.parent.two_sz;
      if (c.parent == imp_up && c.site_state == nrg::site::kDown) flip_from = &c;
      if (c.parent == imp_dn && c.site_state == nrg::site::kUp) flip_to = &c;
    }
    if (flip_from && flip_to) {
      ox(flip_to->offset, flip_from->offset) = 1.0;
      ox(flip_from->offset, flip_to->offset) = 1.0;
    }
    const auto v = block.vectors.leftCols(block.kept);
    ops.ox.emplace(sector, v.transpose() * ox * v);
    ops.oz.emplace(sector, v.transpose() * oz * v);
  }
  return ops;
}

std::map<Sector, Eigen::MatrixXd>
propagate_operator(const std::map<Sector, Eigen::MatrixXd> &op,
                   const nrg::IterationState &next) {
  std::map<Sector, Eigen::MatrixXd> out;
  for (const auto &[sector, block] : next.blocks) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(block.kept, block.kept);
    for (const auto &c : block.components) {
      const auto it = op.find(c.parent);
      if (it == op.end() || it->second.rows() != c.size || it->second.cols() != c.size)
        throw std::runtime_error("operator block for parent sector " + c.parent.label() +
                                 " does not match product component of size " +
                                 std::to_string(c.size));
      const auto v = block.vectors.block(c.offset, 0, c.size, block.kept);
      m.noalias() += v.transpose() * it->second * v;
    }
    out.emplace(sector, std::move(m));
  }
  return out;
}

OperatorBlocks propagate(const OperatorBlocks &ops, const nrg::IterationState &next) {
  if (next.n != ops.iteration + 1)
    throw std::runtime_error("operator blocks tagged with iteration " +
                             std::to_string(ops.iteration) + " cannot be propagated to " +
                             std::to_string(next.n));
  OperatorBlocks out;
  out.iteration = next.n;
  out.ox = propagate_operator(ops.ox, next);
  out.oz = propagate_operator(ops.oz, next);
  return out;
}

RawExpectation ground_expectation(const nrg::IterationState &state, const OperatorBlocks &ops,
                                  double degeneracy_tol) {
  RawExpectation raw;
  raw.degeneracy = 0;
  for (const auto &[sector, block] : state.blocks) {
    const auto &ox = ops.ox.at(sector);
    const auto &oz = ops.oz.at(sector);
    for (Eigen::Index i = 0; i < block.kept && block.energies(i) <= degeneracy_tol; ++i) {
      raw.ox += ox(i, i);
      raw.two_sz += 2.0 * oz(i, i);
      ++raw.degeneracy;
    }
  }
  if (raw.degeneracy == 0) throw std::runtime_error("no ground state among kept states");
  raw.ox /= raw.degeneracy;
  raw.two_sz /= raw.degeneracy;
  return raw;
}

SpinExpectation expectation_values(const nrg::IterationState &state, const OperatorBlocks &ops,
                                   bool converged, bool allow_unconverged,
                                   double degeneracy_tol) {
  if (!converged && !allow_unconverged)
    throw NotConvergedError("run did not converge at iteration " + std::to_string(state.n) +
                            "; refusing to report expectation values");
  return to_reported(ground_expectation(state, ops, degeneracy_tol));
}

namespace {

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

} // namespace

Entanglement entanglement_entropy(double sx, double sz) {
  double norm = std::hypot(sx, sz);
  if (norm > 1.0 + 1e-6)
    throw NonphysicalStateError("|<sigma>| = " + std::to_string(norm) + " exceeds 1");
  norm = std::min(norm, 1.0);
  Entanglement e;
  e.norm = norm;
  e.p_plus = 0.5 * (1.0 + norm);
  e.p_minus = 0.5 * (1.0 - norm);
  e.entropy = std::max(0.0, -xlog2x(e.p_plus) - xlog2x(e.p_minus)); // no -0 for pure states
  return e;
}

AlphaMax maximize_entropy(const std::function<double(double)> &entropy_of_alpha,
                          const std::vector<double> &grid, double tolerance) {
  if (grid.size() < 3) throw std::invalid_argument("alpha grid needs at least 3 points");

  AlphaMax result;
  std::vector<double> values;
  values.reserve(grid.size());
  for (double a : grid) {
    values.push_back(entropy_of_alpha(a));
    ++result.evaluations;
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  if (best == 0 || best + 1 == grid.size())
    throw std::runtime_error("no interior maximum found on the alpha grid");

  // Golden-section search on the bracket around the grid maximum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = grid[best - 1];
  double hi = grid[best + 1];
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = entropy_of_alpha(x1);
  double f2 = entropy_of_alpha(x2);
  result.evaluations += 2;
  while (hi - lo > tolerance) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = entropy_of_alpha(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = entropy_of_alpha(x2);
    }
    ++result.evaluations;
  }

  // Both probes lie in the final bracket, which contains the maximizer.
  if (f1 >= f2) {
    result.alpha = x1;
    result.entropy = f1;
  } else {
    result.alpha = x2;
    result.entropy = f2;
  }
  return result;
}

} // namespace sbnrg
