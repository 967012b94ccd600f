#pragma once

// Exact finite pencil K - lambda*M for a truncated atomic measure.
//
// Eigenfunctions of -y'' = lambda*rho*y with atomic rho are affine between
// atoms, so the hat-function discretization on the atom mesh is exact: the
// only approximation anywhere in this library is the truncation level of the
// measure itself.

#include "stieltjes/core.hpp"
#include "stieltjes/selfsim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stieltjes {

/// Tridiagonal stiffness plus signed diagonal mass on the atom mesh.
/// Gaps are kept in factored closed form (a_m^r times level-0 segments),
/// never as differences of accumulated positions: at depth r the gaps shrink
/// like a_m^r while positions stay O(1), so subtraction would lose all digits.
template <typename Scalar>
struct DiscreteSystem {
  VectorX<Scalar> nodes;     // interior nodes x_1..x_N (diagnostic only)
  VectorX<Scalar> gaps;      // h_0..h_N, N+1 entries including boundary gaps
  VectorX<Scalar> kdiag;     // K_ii = 1/h_{i-1} + 1/h_i
  VectorX<Scalar> koff;      // K_{i,i+1} = -1/h_i, N-1 entries
  VectorX<Scalar> masses;    // diagonal of M (signed)
  std::vector<int> levels;   // atom level per node
  std::vector<int> indices;  // atom index k per node
  int truncation_level = 0;
  SelfSimilarParams<Scalar> params;
  bool structured = false;

  Index size() const { return masses.size(); }

  MatrixX<Scalar> dense_stiffness() const {
    const Index n = size();
    MatrixX<Scalar> K = MatrixX<Scalar>::Zero(n, n);
    for (Index i = 0; i < n; ++i) K(i, i) = kdiag[i];
    for (Index i = 0; i + 1 < n; ++i) K(i, i + 1) = K(i + 1, i) = koff[i];
    return K;
  }

  MatrixX<Scalar> dense_pencil(Scalar lambda) const {
    MatrixX<Scalar> T = dense_stiffness();
    T.diagonal() -= lambda * masses;
    return T;
  }
};

struct Inertia {
  Index n_minus = 0;
  Index n_zero = 0;
  Index n_plus = 0;
};

/// Ordered spectrum slices: positive lambda_1 < lambda_2 < ... and negative
/// lambda_{-1} > lambda_{-2} > ..., with enclosure half-widths and, when the
/// sequence came out of converge_in_level, the last R -> R+2 relative change
/// per eigenvalue.
template <typename Scalar>
struct EigenSequence {
  VectorX<Scalar> positive, negative;
  VectorX<Scalar> positive_err, negative_err;
  VectorX<Scalar> positive_rchange, negative_rchange;
  int truncation_level = 0;
  Scalar tolerance = Scalar(0);
};

struct BranchRequest {
  int positive = 0;
  int negative = 0;
};

namespace detail {

constexpr double kGapFloor = 1e-290;

// Factored gap list for a structured measure: wraps the level-(r-1) gap
// structure into piece m and flanks it with the level-0 segments. All gap
// values are products of one exact breakpoint segment with powers of a_m.
template <typename Scalar>
VectorX<Scalar> structured_gaps(const SelfSimilarParams<Scalar>& p, int depth) {
  const VectorX<Scalar> z = zeta(p);
  const Scalar am = p.a[p.m - 1];

  // presence pattern, identical at every level
  std::vector<int> left, right;
  for (int k = 1; k <= p.n - 1; ++k) {
    if (z[k - 1] == Scalar(0)) continue;
    (k <= p.m - 1 ? left : right).push_back(k);
  }

  // exact segment between breakpoints i < j (alpha indices, 0..n)
  auto seg = [&p](int i, int j) {
    Scalar s = Scalar(0);
    for (int l = i + 1; l <= j; ++l) s += p.a[l - 1];
    return s;
  };

  auto level0 = [&]() {
    std::vector<Scalar> g;
    int prev = 0;
    for (int k : left) g.push_back(seg(prev, k)), prev = k;
    for (int k : right) g.push_back(seg(prev, k)), prev = k;
    g.push_back(seg(prev, p.n));
    return g;
  };

  std::vector<Scalar> inner = level0();
  for (int pass = 1; pass < depth; ++pass) {
    std::vector<Scalar> g;
    g.reserve(inner.size() + left.size() + right.size() + 1);
    int prev = 0;
    for (int k : left) g.push_back(seg(prev, k)), prev = k;
    g.push_back(seg(prev, p.m - 1) + am * inner.front());
    for (std::size_t i = 1; i + 1 < inner.size(); ++i) g.push_back(am * inner[i]);
    const Scalar out = am * inner.back();
    if (right.empty()) {
      g.push_back(out + seg(p.m, p.n));
    } else {
      g.push_back(out + seg(p.m, right.front()));
      prev = right.front();
      for (std::size_t i = 1; i < right.size(); ++i) g.push_back(seg(prev, right[i])), prev = right[i];
      g.push_back(seg(prev, p.n));
    }
    inner = std::move(g);
  }

  return Eigen::Map<const VectorX<Scalar>>(inner.data(), static_cast<Index>(inner.size()));
}

}  // namespace detail

/// Reduces the truncated measure to its exact pencil. Dirichlet boundary
/// nodes are eliminated. Throws DegenerateGap when two atoms collide at the
/// resolution of the arithmetic (truncation deeper than the scalar type can
/// represent) and EmptyMeasure when there is nothing to assemble.
template <typename Scalar>
DiscreteSystem<Scalar> assemble(const JumpMeasure<Scalar>& jm) {
  const Index n = jm.size();
  if (n == 0) throw Error(errc::empty_measure, "measure has no atoms");

  DiscreteSystem<Scalar> sys;
  sys.nodes.resize(n);
  sys.masses.resize(n);
  sys.levels.resize(n);
  sys.indices.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& atm = jm.atoms[static_cast<std::size_t>(i)];
    sys.nodes[i] = atm.position;
    sys.masses[i] = atm.mass;
    sys.levels[static_cast<std::size_t>(i)] = atm.level;
    sys.indices[static_cast<std::size_t>(i)] = atm.index;
    if (i > 0 && !(sys.nodes[i] > sys.nodes[i - 1])) {
      throw Error(errc::degenerate_gap, "atoms collide within representation precision");
    }
  }

  if (jm.structured) {
    int depth = 0;
    for (const auto& atm : jm.atoms) depth = std::max(depth, atm.level + 1);
    sys.gaps = detail::structured_gaps(jm.params, depth);
    sys.params = jm.params;
    sys.structured = true;
  } else {
    sys.gaps.resize(n + 1);
    sys.gaps[0] = sys.nodes[0];
    for (Index i = 1; i < n; ++i) sys.gaps[i] = sys.nodes[i] - sys.nodes[i - 1];
    sys.gaps[n] = Scalar(1) - sys.nodes[n - 1];
  }
  if (sys.gaps.size() != n + 1) {
    throw Error(errc::size_mismatch, "gap structure does not match atom list");
  }
  for (Index i = 0; i <= n; ++i) {
    if (!(sys.gaps[i] > Scalar(detail::kGapFloor))) {
      throw Error(errc::degenerate_gap, "vanishing mesh gap at index " + std::to_string(i));
    }
  }

  sys.kdiag.resize(n);
  sys.koff.resize(n > 0 ? n - 1 : 0);
  for (Index i = 0; i < n; ++i) sys.kdiag[i] = Scalar(1) / sys.gaps[i] + Scalar(1) / sys.gaps[i + 1];
  for (Index i = 0; i + 1 < n; ++i) sys.koff[i] = -Scalar(1) / sys.gaps[i + 1];
  sys.truncation_level = jm.truncation_level;
  return sys;
}

namespace detail {

// Negative index of the principal block [begin, end) of K - lambda*M,
// computed as the number of sign changes along the Sturm sequence of leading
// principal minors. The minors are, up to positive gap products, the node
// values of the transfer recurrence y' jump = -lambda*J*y, which keeps every
// operation relative on strongly graded meshes (the pivot-quotient form
// subtracts O(1/h) terms and loses the eigenvalue information there).
// A vanishing minor counts on the negative side, the bisection-safe
// convention, and the running pair (y, s) is rescaled to dodge overflow for
// very large |lambda|.
template <typename Scalar>
Index sturm_negcount(const DiscreteSystem<Scalar>& sys, Scalar lambda, Index begin, Index end) {
  using std::abs;
  constexpr Scalar rescale_at = Scalar(0x1p332);  // 2^332: exponent-only rescaling
  Index count = 0;
  Scalar y = Scalar(0);
  Scalar s = Scalar(1);
  bool prev_neg = false;
  for (Index i = begin; i < end; ++i) {
    y += sys.gaps[i] * s;
    const bool neg = !(y > Scalar(0));
    if (neg != prev_neg) ++count;
    prev_neg = neg;
    s -= lambda * sys.masses[i] * y;
    if (abs(y) > rescale_at || abs(s) > rescale_at) {
      y /= rescale_at;
      s /= rescale_at;
    }
  }
  if (end > begin) {
    y += sys.gaps[end] * s;
    if (!(y > Scalar(0)) != prev_neg) ++count;
  }
  return count;
}

template <typename Scalar>
Index sturm_negcount(const DiscreteSystem<Scalar>& sys, Scalar lambda) {
  return sturm_negcount(sys, lambda, Index(0), sys.size());
}

}  // namespace detail

/// Exact inertia of the matrix K - lambda*M. The negative index is taken on
/// the spectrum side toward zero, so n_zero > 0 exactly when lambda is a
/// pencil eigenvalue to machine precision.
template <typename Scalar>
Inertia inertia(const DiscreteSystem<Scalar>& sys, Scalar lambda) {
  using std::abs;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar delta = Scalar(8) * eps * std::max(Scalar(1), abs(lambda));
  const Scalar inner = (lambda >= Scalar(0)) ? lambda - delta : lambda + delta;
  const Scalar outer = (lambda >= Scalar(0)) ? lambda + delta : lambda - delta;
  Inertia s;
  s.n_minus = detail::sturm_negcount(sys, inner);
  const Index jump = detail::sturm_negcount(sys, outer) - s.n_minus;
  s.n_zero = std::max(Index(0), jump);
  s.n_plus = sys.size() - s.n_minus - s.n_zero;
  return s;
}

/// Eigenvalue counting function of the pencil: for Lambda > 0 the number of
/// positive eigenvalues below Lambda, for Lambda < 0 the number of negative
/// eigenvalues above Lambda, and 0 at Lambda = 0. Equals the negative index
/// of K - Lambda*M by Sylvester's law (K is positive definite).
template <typename Scalar>
Index counting(const DiscreteSystem<Scalar>& sys, Scalar Lambda) {
  if (Lambda == Scalar(0)) return 0;
  return detail::sturm_negcount(sys, Lambda);
}

namespace detail {

// Bisection on the counting function for one spectral branch. `sign` maps
// the branch onto the positive axis; returns moduli in increasing order.
template <typename Scalar>
void bisect_branch(const DiscreteSystem<Scalar>& sys, Scalar sign, int want, Scalar rel_tol,
                   VectorX<Scalar>& out, VectorX<Scalar>& err) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar tol = std::max(rel_tol, Scalar(4) * eps);
  auto cnt = [&](Scalar t) { return counting(sys, sign * t); };

  out.resize(want);
  err.resize(want);
  Scalar hi = Scalar(1);
  for (int j = 1; j <= want; ++j) {
    while (cnt(hi) < j) {
      hi *= Scalar(4);
      if (hi > Scalar(1e290)) throw Error(errc::no_convergence, "bracket expansion exhausted");
    }
    Scalar lo = (j > 1) ? out[j - 2] : Scalar(0);
    if (cnt(lo) >= j) lo = Scalar(0);  // defensive; previous value sits left of the jump
    Scalar width = hi - lo;
    for (int it = 0; it < 2000 && width > tol * hi; ++it) {
      const Scalar mid = lo + width / Scalar(2);
      (cnt(mid) >= j) ? hi = mid : lo = mid;
      width = hi - lo;
    }
    out[j - 1] = lo + width / Scalar(2);
    err[j - 1] = width / Scalar(2);
    hi = std::max(hi, out[j - 1] * Scalar(2));
  }
}

}  // namespace detail

/// Bisection eigensolver. Each returned lambda is enclosed by a counting
/// transition of half-width at most rel_tol*|lambda|. Throws BranchEmpty when
/// the mass matrix has no entry of a requested sign (that branch of the
/// spectrum is empty by the inertia bound) and TooFewEigenvalues when the
/// truncated measure cannot supply the requested count.
template <typename Scalar>
EigenSequence<Scalar> eigenvalues(const DiscreteSystem<Scalar>& sys, BranchRequest want,
                                  Scalar rel_tol = Scalar(1e-8)) {
  const Index pos_avail = (sys.masses.array() > Scalar(0)).count();
  const Index neg_avail = (sys.masses.array() < Scalar(0)).count();

  EigenSequence<Scalar> seq;
  seq.truncation_level = sys.truncation_level;
  seq.tolerance = rel_tol;

  auto demand = [](const char* branch, int want_n, Index avail) {
    if (want_n <= 0) return;
    if (avail == 0) {
      throw Error(errc::branch_empty,
                  std::string("mass matrix has no ") + branch + " entries; branch is empty");
    }
    if (avail < want_n) {
      throw Error(errc::too_few_eigenvalues,
                  std::string(branch) + " branch holds only " + std::to_string(avail) +
                      " eigenvalues at this truncation level");
    }
  };
  demand("positive", want.positive, pos_avail);
  demand("negative", want.negative, neg_avail);

  if (want.positive > 0) {
    detail::bisect_branch(sys, Scalar(1), want.positive, rel_tol, seq.positive, seq.positive_err);
  }
  if (want.negative > 0) {
    VectorX<Scalar> mod, moderr;
    detail::bisect_branch(sys, Scalar(-1), want.negative, rel_tol, mod, moderr);
    seq.negative = -mod;
    seq.negative_err = moderr;
  }

  // all eigenvalues of the problem are simple; a collision means the
  // truncation is past what the arithmetic can separate
  auto check_simple = [](const VectorX<Scalar>& v) {
    using std::abs;
    for (Index i = 0; i + 1 < v.size(); ++i) {
      if (!(abs(v[i + 1] - v[i]) > Scalar(1e-9) * std::max(Scalar(1), abs(v[i + 1])))) {
        throw Error(errc::precondition_violated, "computed eigenvalues are not simple");
      }
    }
  };
  check_simple(seq.positive);
  check_simple(seq.negative);
  return seq;
}

/// Dense oracle. The inverse of the string stiffness is the exact Dirichlet
/// Green kernel, K^{-1}_ij = min(x_i, x_j) (1 - max(x_i, x_j)). With
/// C = |M|^{1/2} and the sign matrix S, the Gram matrix B = C K^{-1} C is
/// positive definite and the pencil eigenvalues obey 1/lambda = mu with mu
/// the eigenvalues of the congruence-transformed mass matrix W = L^T S L,
/// B = L L^T. Working in the mu variable keeps the low end of the spectrum
/// at the top of ||W||, where a dense symmetric solve is accurate; mesh
/// grading never enters (no 1/h is formed). A mu below the solver resolution
/// produces no eigenvalue.
template <typename Scalar>
EigenSequence<Scalar> eigs_dense(const DiscreteSystem<Scalar>& sys) {
  using std::abs;
  using std::sqrt;
  const Index n = sys.size();
  if (n > 2000) throw Error(errc::precondition_violated, "dense solve limited to N <= 2000");

  MatrixX<Scalar> B(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const Scalar green = sys.nodes[j] * (Scalar(1) - sys.nodes[i]);  // j <= i
      B(i, j) = B(j, i) = sqrt(abs(sys.masses[i])) * sqrt(abs(sys.masses[j])) * green;
    }
  }
  const Eigen::LLT<MatrixX<Scalar>> llt(B);
  if (llt.info() != Eigen::Success) {
    throw Error(errc::no_convergence,
                "Green-kernel Gram matrix lost definiteness; truncation too deep for the oracle");
  }
  const MatrixX<Scalar> L = llt.matrixL();
  MatrixX<Scalar> W = MatrixX<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const Scalar s = (sys.masses[i] > Scalar(0)) ? Scalar(1) : Scalar(-1);
    W.noalias() += s * L.row(i).transpose() * L.row(i);
  }

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(W, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(errc::no_convergence, "dense symmetric eigensolver failed");
  }
  const VectorX<Scalar> mu = solver.eigenvalues();  // ascending
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar mu_scale = mu.cwiseAbs().maxCoeff();
  const Scalar drop = Scalar(4) * Scalar(static_cast<double>(n)) * eps * mu_scale;

  EigenSequence<Scalar> seq;
  seq.truncation_level = sys.truncation_level;
  std::vector<Scalar> pos, neg;
  for (Index i = n - 1; i >= 0 && mu[i] > drop; --i) pos.push_back(Scalar(1) / mu[i]);
  for (Index i = 0; i < n && mu[i] < -drop; ++i) neg.push_back(Scalar(1) / mu[i]);
  seq.positive = Eigen::Map<const VectorX<Scalar>>(pos.data(), static_cast<Index>(pos.size()));
  seq.negative = Eigen::Map<const VectorX<Scalar>>(neg.data(), static_cast<Index>(neg.size()));
  const Scalar c = Scalar(8) * Scalar(static_cast<double>(n)) * eps * mu_scale;
  seq.positive_err = (c * seq.positive.array().square()).matrix();
  seq.negative_err = (c * seq.negative.array().square()).matrix();
  seq.tolerance = c;
  return seq;
}

/// Shooting determinant: y(1; lambda) for y(0) = 0, y'(0) = 1, with the slope
/// jump y'+ = y'- - lambda*J*y at every atom. Vanishes exactly at the
/// eigenvalues of the truncated problem.
template <typename Scalar>
Scalar shooting_det(const DiscreteSystem<Scalar>& sys, Scalar lambda) {
  Scalar y = Scalar(0);
  Scalar slope = Scalar(1);
  for (Index i = 0; i < sys.size(); ++i) {
    y += sys.gaps[i] * slope;
    slope -= lambda * sys.masses[i] * y;
  }
  return y + sys.gaps[sys.size()] * slope;
}

template <typename Scalar>
Scalar shooting_det(const JumpMeasure<Scalar>& jm, Scalar lambda) {
  return shooting_det(assemble(jm), lambda);
}

/// Deepens the truncation R, R+2, R+4, ... until every requested eigenvalue
/// moves by less than tol (relative). The returned sequence records the last
/// per-eigenvalue change and the final level.
template <typename Scalar>
EigenSequence<Scalar> converge_in_level(const SelfSimilarParams<Scalar>& p, BranchRequest want,
                                        Scalar tol = Scalar(1e-8), int r_max = 64) {
  const VectorX<Scalar> z = zeta(p);
  if ((z.array() == Scalar(0)).all()) {
    throw Error(errc::branch_empty, "empty spectrum: all zeta values are zero");
  }
  const auto [zp, zm] = z_counts(p);
  const Scalar inner_tol = std::min(tol / Scalar(100), Scalar(1e-10));

  if (p.d == Scalar(0)) {
    auto seq = eigenvalues(assemble(jump_measure(p, 1)), want, inner_tol);
    seq.positive_rchange = VectorX<Scalar>::Zero(seq.positive.size());
    seq.negative_rchange = VectorX<Scalar>::Zero(seq.negative.size());
    seq.truncation_level = 1;
    return seq;
  }

  // smallest level at which both branches hold the requested counts
  int r0 = 2;
  {
    long pos = 0, neg = 0;
    int r = 0;
    while (r < r_max && (pos < want.positive || neg < want.negative)) {
      const bool flip = (p.d < Scalar(0)) && (r % 2 == 1);
      pos += flip ? zm : zp;
      neg += flip ? zp : zm;
      ++r;
    }
    if (pos < want.positive || neg < want.negative) {
      throw Error(errc::branch_empty, "requested branch is empty for these parameters");
    }
    r0 = std::max(r + 1, 3);
  }

  auto solve_at = [&](int R) {
    return eigenvalues(assemble(jump_measure(p, R)), want, inner_tol);
  };

  auto rel_change = [](const VectorX<Scalar>& cur, const VectorX<Scalar>& prev) {
    using std::abs;
    VectorX<Scalar> ch(cur.size());
    for (Index i = 0; i < cur.size(); ++i) {
      ch[i] = abs(cur[i] - prev[i]) / std::max(abs(cur[i]), std::numeric_limits<Scalar>::min());
    }
    return ch;
  };

  EigenSequence<Scalar> prev = solve_at(r0);
  for (int R = r0 + 2; R <= r_max; R += 2) {
    EigenSequence<Scalar> cur = solve_at(R);
    cur.positive_rchange = rel_change(cur.positive, prev.positive);
    cur.negative_rchange = rel_change(cur.negative, prev.negative);
    const Scalar worst =
        std::max(cur.positive_rchange.size() ? cur.positive_rchange.maxCoeff() : Scalar(0),
                 cur.negative_rchange.size() ? cur.negative_rchange.maxCoeff() : Scalar(0));
    if (worst < tol) {
      cur.truncation_level = R;
      cur.tolerance = tol;
      return cur;
    }
    prev = std::move(cur);
  }
  throw Error(errc::no_convergence,
              "eigenvalues did not stabilize below tolerance by truncation level " +
                  std::to_string(r_max));
}

}  // namespace stieltjes
