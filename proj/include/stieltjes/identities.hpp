#pragma once

// Finite-dimensional identity checks behind the geometric eigenvalue
// asymptotics: the (n-1)-dimensional hat-function form C(lambda), inertia
// additivity of Schur complements, the one-level scaling identity, and the
// renormalization property of the counting function.

#include "stieltjes/core.hpp"
#include "stieltjes/selfsim.hpp"
#include "stieltjes/spectra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace stieltjes {

/// Inertia of a dense symmetric matrix via its eigenvalues. Eigenvalues
/// within dim*eps*||A|| of zero count as zero. An empty block has empty
/// inertia.
template <typename Derived>
Inertia dense_inertia(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  if (A.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(A, Eigen::EigenvaluesOnly);
  const VectorX<Scalar> ev = solver.eigenvalues();
  const Scalar tol = Scalar(static_cast<double>(A.rows())) *
                     std::numeric_limits<Scalar>::epsilon() *
                     std::max(ev.cwiseAbs().maxCoeff(), Scalar(1));
  Inertia s;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol) ++s.n_minus;
    else if (ev[i] > tol) ++s.n_plus;
    else ++s.n_zero;
  }
  return s;
}

/// Piecewise-affine hat: 0 outside [left, right], 1 at peak.
template <typename Scalar>
struct HatFunction {
  Scalar left, peak, right;  // gamma_k < alpha_k < delta_k

  Scalar operator()(Scalar x) const {
    if (x <= left || x >= right) return Scalar(0);
    if (x <= peak) return (x - left) / (peak - left);
    return (right - x) / (right - peak);
  }
  Scalar rise_slope() const { return Scalar(1) / (peak - left); }
  Scalar fall_slope() const { return Scalar(-1) / (right - peak); }
};

/// Hat functions e_1..e_{n-1} spanning the complement subspace. The hats at
/// the recursive piece stop at the nearest level-1 atom positions
/// (alpha_{m-1} + a_m a_1 and alpha_m - a_m a_n), which keeps every deeper
/// atom outside all supports.
template <typename Scalar>
struct H2Basis {
  std::vector<HatFunction<Scalar>> e;
  VectorX<Scalar> alpha_interior;  // alpha_1..alpha_{n-1}
};

template <typename Scalar>
H2Basis<Scalar> h2_basis(const SelfSimilarParams<Scalar>& p) {
  const Breakpoints<Scalar> b = breakpoints(p);
  const Scalar am = p.a[p.m - 1];
  H2Basis<Scalar> basis;
  basis.alpha_interior.resize(p.n - 1);
  for (int k = 1; k <= p.n - 1; ++k) {
    const Scalar gamma = (k == p.m) ? b.alpha[p.m] - am * p.a[p.n - 1] : b.alpha[k - 1];
    const Scalar delta = (k == p.m - 1) ? b.alpha[p.m - 1] + am * p.a[0] : b.alpha[k + 1];
    basis.e.push_back({gamma, b.alpha[k], delta});
    basis.alpha_interior[k - 1] = b.alpha[k];
  }
  return basis;
}

/// Gram matrix of the hats in the Dirichlet inner product, by exact
/// closed-form integration of the constant slopes over segment overlaps.
template <typename Scalar>
MatrixX<Scalar> h2_gram(const H2Basis<Scalar>& basis) {
  const Index n = static_cast<Index>(basis.e.size());
  MatrixX<Scalar> G = MatrixX<Scalar>::Zero(n, n);
  auto segments = [](const HatFunction<Scalar>& h) {
    return std::array<std::array<Scalar, 3>, 2>{
        std::array<Scalar, 3>{h.left, h.peak, h.rise_slope()},
        std::array<Scalar, 3>{h.peak, h.right, h.fall_slope()}};
  };
  for (Index j = 0; j < n; ++j) {
    for (Index k = j; k < n; ++k) {
      Scalar sum = Scalar(0);
      for (const auto& sj : segments(basis.e[static_cast<std::size_t>(j)])) {
        for (const auto& sk : segments(basis.e[static_cast<std::size_t>(k)])) {
          const Scalar lo = std::max(sj[0], sk[0]);
          const Scalar hi = std::min(sj[1], sk[1]);
          if (hi > lo) sum += sj[2] * sk[2] * (hi - lo);
        }
      }
      G(j, k) = G(k, j) = sum;
    }
  }
  return G;
}

/// The form matrix of C(lambda) computed two independent ways:
/// `via_atoms` sums mass * e_j(x) e_k(x) over every atom of the truncated
/// measure, `via_zeta` uses the closed diagonal expression. Their agreement
/// is the key convention cross-check.
template <typename Scalar>
struct CFormPair {
  MatrixX<Scalar> via_atoms;
  MatrixX<Scalar> via_zeta;
  Scalar max_abs_diff;
};

template <typename Scalar>
CFormPair<Scalar> c_form(const SelfSimilarParams<Scalar>& p, Scalar lambda, int R = 4,
                         Scalar tol = Scalar(1e-10)) {
  const H2Basis<Scalar> basis = h2_basis(p);
  const MatrixX<Scalar> G = h2_gram(basis);
  const Index n = static_cast<Index>(basis.e.size());

  CFormPair<Scalar> out;
  out.via_atoms = G;
  const JumpMeasure<Scalar> jm = jump_measure(p, R);
  VectorX<Scalar> v(n);
  for (const auto& atm : jm.atoms) {
    for (Index k = 0; k < n; ++k) v[k] = basis.e[static_cast<std::size_t>(k)](atm.position);
    if ((v.array() != Scalar(0)).any()) out.via_atoms -= (lambda * atm.mass) * v * v.transpose();
  }

  out.via_zeta = G;
  out.via_zeta.diagonal() -= lambda * zeta(p);

  out.max_abs_diff = (out.via_atoms - out.via_zeta).cwiseAbs().maxCoeff();
  if (!(out.max_abs_diff <= tol)) {
    throw Error(errc::mismatch_beyond_tolerance,
                "c_form routes disagree by " + std::to_string(static_cast<double>(out.max_abs_diff)) +
                    " at lambda=" + std::to_string(static_cast<double>(lambda)));
  }
  return out;
}

/// Certificate that the negative index of C(lambda) has stabilized at Z_plus:
/// the inertia equals Z_plus at lambda_star, 2*lambda_star and 4*lambda_star.
template <typename Scalar>
struct IndCCertificate {
  int z_plus;
  Scalar lambda_star;
};

template <typename Scalar>
IndCCertificate<Scalar> ind_c_large_lambda(const SelfSimilarParams<Scalar>& p) {
  const auto [zp, zm] = z_counts(p);
  if (zp + zm != p.n - 1) {
    throw Error(errc::not_stabilized, "zeta degenerate: Z_plus + Z_minus < n - 1");
  }
  const H2Basis<Scalar> basis = h2_basis(p);
  const MatrixX<Scalar> G = h2_gram(basis);
  const VectorX<Scalar> z = zeta(p);
  auto ind_at = [&](Scalar lambda) {
    MatrixX<Scalar> F = G;
    F.diagonal() -= lambda * z;
    return dense_inertia(F).n_minus;
  };
  for (Scalar ls = Scalar(1); ls < Scalar(1e24); ls *= Scalar(2)) {
    if (ind_at(ls) == zp && ind_at(Scalar(2) * ls) == zp && ind_at(Scalar(4) * ls) == zp) {
      return {zp, ls};
    }
  }
  throw Error(errc::not_stabilized, "inertia of C(lambda) never stabilized at Z_plus");
}

/// Spectral norms of C(lambda)^{-1} over a lambda grid, with a monotone tail
/// verdict on lambda * ||C^{-1}(lambda)||. Throws SingularC when a grid point
/// hits the finite spectrum of the (n-1)-dimensional pencil.
template <typename Scalar>
struct CNormReport {
  std::vector<std::pair<Scalar, Scalar>> points;  // (lambda, ||C^{-1}||)
  bool bounded_tail = false;
};

template <typename Scalar>
CNormReport<Scalar> c_inverse_norm(const SelfSimilarParams<Scalar>& p,
                                   const std::vector<Scalar>& lambda_grid) {
  using std::abs;
  const auto [zp, zm] = z_counts(p);
  if (zp + zm != p.n - 1) {
    throw Error(errc::precondition_violated,
                "a zeta entry vanishes: C(lambda) has a lambda-free direction");
  }
  const H2Basis<Scalar> basis = h2_basis(p);
  const MatrixX<Scalar> G = h2_gram(basis);
  const VectorX<Scalar> z = zeta(p);

  CNormReport<Scalar> report;
  for (Scalar lambda : lambda_grid) {
    MatrixX<Scalar> F = G;
    F.diagonal() -= lambda * z;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(F, Eigen::EigenvaluesOnly);
    const VectorX<Scalar> ev = solver.eigenvalues();
    const Scalar min_abs = ev.cwiseAbs().minCoeff();
    const Scalar scale = std::max(ev.cwiseAbs().maxCoeff(), Scalar(1));
    if (min_abs <= Scalar(static_cast<double>(F.rows())) * std::numeric_limits<Scalar>::epsilon() * scale) {
      throw Error(errc::singular_c,
                  "grid point lambda=" + std::to_string(static_cast<double>(lambda)) +
                      " lies in the spectrum of C");
    }
    report.points.emplace_back(lambda, Scalar(1) / min_abs);
  }

  // tail test: on the trailing half of the grid, lambda*||C^{-1}|| should be
  // flat within a factor of two between neighbours
  report.bounded_tail = true;
  const std::size_t from = report.points.size() / 2;
  for (std::size_t i = from; i + 1 < report.points.size(); ++i) {
    const Scalar t0 = abs(report.points[i].first) * report.points[i].second;
    const Scalar t1 = abs(report.points[i + 1].first) * report.points[i + 1].second;
    if (!(t1 >= Scalar(0.5) * t0 && t1 <= Scalar(2) * t0)) report.bounded_tail = false;
  }
  return report;
}

/// Index split of the assembled mesh: `inner` holds the nodes strictly inside
/// the recursive piece (atom level >= 1), `outer` the level-0 nodes.
struct BlockPartition {
  std::vector<Index> inner;
  std::vector<Index> outer;
};

template <typename Scalar>
BlockPartition level_partition(const DiscreteSystem<Scalar>& sys) {
  BlockPartition part;
  for (Index i = 0; i < sys.size(); ++i) {
    (sys.levels[static_cast<std::size_t>(i)] >= 1 ? part.inner : part.outer).push_back(i);
  }
  return part;
}

template <typename Scalar>
struct SchurReport {
  Scalar lambda;
  Index ind_full, ind_schur, ind_block;
  bool holds;
};

/// Inertia additivity on raw blocks: ind [A B^T; B C] = ind(A - B^T C^{-1} B) + ind C.
/// An empty C block degenerates to ind T = ind A.
template <typename Scalar>
SchurReport<Scalar> schur_blocks_check(const MatrixX<Scalar>& A, const MatrixX<Scalar>& B,
                                       const MatrixX<Scalar>& C, Scalar lambda = Scalar(0)) {
  const Index na = A.rows(), nc = C.rows();
  MatrixX<Scalar> T(na + nc, na + nc);
  T.topLeftCorner(na, na) = A;
  T.bottomRightCorner(nc, nc) = C;
  T.bottomLeftCorner(nc, na) = B;
  T.topRightCorner(na, nc) = B.transpose();

  if (nc > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> csolve(C, Eigen::EigenvaluesOnly);
    const Scalar cmin = csolve.eigenvalues().cwiseAbs().minCoeff();
    const Scalar cscale = std::max(csolve.eigenvalues().cwiseAbs().maxCoeff(), Scalar(1));
    if (cmin <= Scalar(static_cast<double>(nc)) * std::numeric_limits<Scalar>::epsilon() * cscale) {
      throw Error(errc::singular_block, "C block is singular at this lambda");
    }
  }

  const MatrixX<Scalar> schur =
      (nc > 0) ? MatrixX<Scalar>(A - B.transpose() * C.fullPivLu().solve(B)) : A;
  SchurReport<Scalar> rep;
  rep.lambda = lambda;
  rep.ind_full = dense_inertia(T).n_minus;
  rep.ind_schur = dense_inertia(schur).n_minus;
  rep.ind_block = dense_inertia(C).n_minus;
  rep.holds = (rep.ind_full == rep.ind_schur + rep.ind_block);
  return rep;
}

/// Inertia additivity for the pencil matrix K - lambda*M under the given
/// partition. Throws SingularBlock when lambda lies in the spectrum of the
/// outer block (the hypothesis of the identity).
template <typename Scalar>
SchurReport<Scalar> schur_identity_check(const DiscreteSystem<Scalar>& sys,
                                         const BlockPartition& part, Scalar lambda) {
  const MatrixX<Scalar> T = sys.dense_pencil(lambda);
  const Index na = static_cast<Index>(part.inner.size());
  const Index nc = static_cast<Index>(part.outer.size());
  MatrixX<Scalar> A(na, na), C(nc, nc), B(nc, na);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < na; ++j) A(i, j) = T(part.inner[i], part.inner[j]);
  for (Index i = 0; i < nc; ++i)
    for (Index j = 0; j < nc; ++j) C(i, j) = T(part.outer[i], part.outer[j]);
  for (Index i = 0; i < nc; ++i)
    for (Index j = 0; j < na; ++j) B(i, j) = T(part.outer[i], part.inner[j]);
  return schur_blocks_check(A, B, C, lambda);
}

template <typename Scalar>
struct ScalingReport {
  Scalar lambda;
  int level;
  Index block_size;
  Index ind_inner_block;   // negative index of the inner block of K_R - lambda M_R
  Index ind_shifted;       // negative index of K_{R-1} - (a_m d_m lambda) M_{R-1}
  bool holds;
};

/// Discrete form of the one-level scaling identity: the inner block of the
/// level-R pencil at lambda matches the full level-(R-1) pencil at
/// a_m*d_m*lambda. Requires the atoms at alpha_{m-1} and alpha_m to be
/// present (their zeta must not vanish) so the block boundary is a true
/// Dirichlet node.
template <typename Scalar>
ScalingReport<Scalar> scaling_identity_check(const SelfSimilarParams<Scalar>& p, int R,
                                             Scalar lambda) {
  if (R < 2) throw Error(errc::precondition_violated, "scaling check needs R >= 2");
  const VectorX<Scalar> z = zeta(p);
  if (p.m >= 2 && z[p.m - 2] == Scalar(0)) {
    throw Error(errc::precondition_violated, "zeta_{m-1} = 0: no node at alpha_{m-1}");
  }
  if (p.m <= p.n - 1 && z[p.m - 1] == Scalar(0)) {
    throw Error(errc::precondition_violated, "zeta_m = 0: no node at alpha_m");
  }

  const DiscreteSystem<Scalar> sys = assemble(jump_measure(p, R));
  Index begin = sys.size(), end = 0;
  for (Index i = 0; i < sys.size(); ++i) {
    if (sys.levels[static_cast<std::size_t>(i)] >= 1) {
      begin = std::min(begin, i);
      end = std::max(end, i + 1);
    }
  }
  if (begin > end) begin = end = 0;  // no deep atoms (d = 0)

  const DiscreteSystem<Scalar> prev = assemble(jump_measure(p, R - 1));
  ScalingReport<Scalar> rep;
  rep.lambda = lambda;
  rep.level = R;
  rep.block_size = end - begin;
  rep.ind_inner_block = detail::sturm_negcount(sys, lambda, begin, end);
  rep.ind_shifted = counting(prev, p.piece_length() * p.d * lambda);
  rep.holds = (rep.ind_inner_block == rep.ind_shifted) && (rep.block_size == prev.size());
  return rep;
}

enum class SpectralBranch { positive, negative };

template <typename Scalar>
struct RenormalizationPoint {
  Scalar t;
  Index s_at_t;
  Index s_shifted;
  long difference;
  Scalar edge_margin;  // log-distance from both window edges to the nearest jump of s
};

template <typename Scalar>
struct RenormalizationReport {
  bool applicable = false;
  int period = 0;  // Z_plus or Z_minus, the expected difference
  std::vector<RenormalizationPoint<Scalar>> points;
  bool holds_everywhere = false;
  std::optional<Scalar> holds_from;  // smallest grid t from which the equality holds onward
  std::string verdict;
};

/// Renormalization property of the counting function: away from jumps,
/// s(t) - s(t + ln(a_m d_m)) equals the branch period. Needs d_m > 0 (the
/// log shift), otherwise reports a skip verdict. Failures are reported, not
/// thrown.
template <typename Scalar>
RenormalizationReport<Scalar> renormalization_check(const SelfSimilarParams<Scalar>& p,
                                                    const std::vector<Scalar>& t_grid,
                                                    SpectralBranch branch = SpectralBranch::positive) {
  using std::abs;
  using std::exp;
  using std::log;
  RenormalizationReport<Scalar> report;
  if (t_grid.empty()) {
    report.verdict = "skipped: empty grid";
    return report;
  }
  if (p.d == Scalar(0)) {
    report.verdict = "skipped: d_m = 0, measure finite, s eventually constant";
    return report;
  }
  if (p.d < Scalar(0)) {
    report.verdict = "skipped: requires d_m > 0";
    return report;
  }
  const auto [zp, zm] = z_counts(p);
  if (zp + zm != p.n - 1) {
    report.verdict = "skipped: zeta degenerate (Z_plus + Z_minus < n - 1)";
    return report;
  }

  report.applicable = true;
  report.period = (branch == SpectralBranch::positive) ? zp : zm;
  const Scalar sign = (branch == SpectralBranch::positive) ? Scalar(1) : Scalar(-1);
  const Scalar shift = log(p.piece_length() * p.d);  // negative

  Scalar t_max = t_grid.front();
  for (Scalar t : t_grid) t_max = std::max(t_max, t);

  // deepen the truncation until the integer differences stop moving
  std::vector<long> diffs, prev_diffs;
  DiscreteSystem<Scalar> sys;
  for (int R = 10; R <= 48; R += 2) {
    sys = assemble(jump_measure(p, R));
    diffs.clear();
    for (Scalar t : t_grid) {
      const Index a = counting(sys, sign * exp(t));
      const Index b = counting(sys, sign * exp(t + shift));
      diffs.push_back(static_cast<long>(a - b));
    }
    if (diffs == prev_diffs) break;
    prev_diffs = diffs;
  }

  // jump locations of s for the margin diagnostics
  Index n_jumps = counting(sys, sign * exp(t_max + Scalar(0.5)));
  n_jumps = std::min<Index>(n_jumps, 64);
  std::vector<Scalar> jump_t;
  if (n_jumps > 0) {
    BranchRequest want;
    (branch == SpectralBranch::positive ? want.positive : want.negative) = static_cast<int>(n_jumps);
    const EigenSequence<Scalar> seq = eigenvalues(sys, want, Scalar(1e-10));
    const VectorX<Scalar>& vals = (branch == SpectralBranch::positive) ? seq.positive : seq.negative;
    for (Index i = 0; i < vals.size(); ++i) jump_t.push_back(log(abs(vals[i])));
  }

  bool all_hold = true;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const Scalar t = t_grid[i];
    RenormalizationPoint<Scalar> pt;
    pt.t = t;
    pt.s_at_t = counting(sys, sign * exp(t));
    pt.s_shifted = counting(sys, sign * exp(t + shift));
    pt.difference = diffs[i];
    pt.edge_margin = std::numeric_limits<Scalar>::infinity();
    for (Scalar edge : {t, t + shift}) {
      for (Scalar j : jump_t) pt.edge_margin = std::min(pt.edge_margin, abs(edge - j));
    }
    report.points.push_back(pt);
    if (pt.difference != report.period) all_hold = false;
  }
  report.holds_everywhere = all_hold;

  for (std::size_t i = 0; i < report.points.size(); ++i) {
    bool tail_ok = true;
    for (std::size_t j = i; j < report.points.size(); ++j) {
      if (report.points[j].difference != report.period) tail_ok = false;
    }
    if (tail_ok) {
      report.holds_from = report.points[i].t;
      break;
    }
  }
  report.verdict = report.holds_everywhere
                       ? "holds at every sampled t"
                       : (report.holds_from ? "holds from the reported t onward"
                                            : "does not hold on the sampled grid");
  return report;
}

}  // namespace stieltjes
