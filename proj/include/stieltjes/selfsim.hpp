#pragma once

// Self-similar step functions on [0,1] and their jump measures.
//
// A function P is fixed by the system P(alpha_{k-1} + a_k t) = beta_k + d_k P(t)
// with exactly one recursive piece (d_k = 0 for k != m). Such P is a step
// function; its distributional derivative rho = P' is a purely atomic measure
// whose atoms accumulate geometrically at the fixed point of the piece-m
// similarity map S_m(x) = alpha_{m-1} + a_m x.

#include "stieltjes/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace stieltjes {

/// Similarity data (n, a_1..a_n, m, d_m, beta_1..beta_n) defining P.
/// The piece index m is 1-based, matching the breakpoint convention
/// alpha_0 = 0, alpha_k = alpha_{k-1} + a_k.
template <typename Scalar>
struct SelfSimilarParams {
  int n = 0;                 // number of similarity pieces
  VectorX<Scalar> a;         // piece lengths, sum to 1
  int m = 0;                 // index of the unique recursive piece, in [1, n]
  Scalar d = Scalar(0);      // recursion multiplier d_m
  VectorX<Scalar> beta;      // piece offsets beta_1..beta_n

  Scalar piece_length() const { return a[m - 1]; }
};

struct Violation {
  errc code;
  std::string detail;
};

/// Checks every parameter invariant; returns the full list of violations
/// (empty means valid). Tolerance for the unit-sum constraint is 1e-12.
template <typename Scalar>
std::vector<Violation> check(const SelfSimilarParams<Scalar>& p) {
  std::vector<Violation> out;
  if (p.n < 2) {
    out.push_back({errc::too_few_pieces, "need at least two pieces, got n=" + std::to_string(p.n)});
    return out;
  }
  if (p.a.size() != p.n || p.beta.size() != p.n) {
    out.push_back({errc::size_mismatch,
                   "expected " + std::to_string(p.n) + " lengths and offsets, got " +
                       std::to_string(p.a.size()) + " and " + std::to_string(p.beta.size())});
    return out;
  }
  for (int k = 0; k < p.n; ++k) {
    if (!(p.a[k] > Scalar(0))) {
      out.push_back({errc::non_positive_length, "a[" + std::to_string(k + 1) + "] <= 0"});
    }
  }
  using std::abs;
  const Scalar sum = p.a.sum();
  if (abs(sum - Scalar(1)) > Scalar(1e-12)) {
    out.push_back({errc::lengths_do_not_sum_to_one, "sum(a) deviates from 1 by more than 1e-12"});
  }
  if (p.m < 1 || p.m > p.n) {
    out.push_back({errc::index_out_of_range, "m=" + std::to_string(p.m) + " not in [1, n]"});
    return out;  // remaining checks need a valid m
  }
  const Scalar am = p.a[p.m - 1];
  if (am > Scalar(0)) {
    if (!(am * abs(p.d) < Scalar(1))) {
      out.push_back({errc::contraction_violated, "a_m*|d_m| >= 1"});
    }
    if (!(am * p.d * p.d < Scalar(1))) {
      out.push_back({errc::contraction_violated, "a_m*d_m^2 >= 1"});
    }
  }
  return out;
}

/// Returns the checked parameters, or throws an Error carrying the first
/// violation (all violations joined into the message).
template <typename Scalar>
SelfSimilarParams<Scalar> validate(SelfSimilarParams<Scalar> p) {
  auto violations = check(p);
  if (violations.empty()) return p;
  std::string msg;
  for (const auto& v : violations) {
    if (!msg.empty()) msg += "; ";
    msg += std::string(errc_name(v.code)) + " (" + v.detail + ")";
  }
  throw Error(violations.front().code, msg);
}

/// Breakpoints alpha_0..alpha_n plus the accumulation point of the atoms,
/// x_star = alpha_{m-1} / (1 - a_m).
template <typename Scalar>
struct Breakpoints {
  VectorX<Scalar> alpha;  // n+1 entries, alpha[0] = 0, alpha[n] = 1
  Scalar x_star;
};

template <typename Scalar>
Breakpoints<Scalar> breakpoints(const SelfSimilarParams<Scalar>& p) {
  Breakpoints<Scalar> b;
  b.alpha.resize(p.n + 1);
  b.alpha[0] = Scalar(0);
  for (int k = 1; k <= p.n; ++k) b.alpha[k] = b.alpha[k - 1] + p.a[k - 1];
  b.x_star = b.alpha[p.m - 1] / (Scalar(1) - p.a[p.m - 1]);
  return b;
}

/// Effective level-0 atom masses zeta_1..zeta_{n-1}. The pieces adjacent to
/// the recursive one pick up cross terms from the boundary values of P.
template <typename Scalar>
VectorX<Scalar> zeta(const SelfSimilarParams<Scalar>& p) {
  VectorX<Scalar> z(p.n - 1);
  for (int k = 1; k <= p.n - 1; ++k) {
    if (k == p.m - 1) {
      z[k - 1] = p.beta[p.m - 1] - p.beta[p.m - 2] + p.d * p.beta[0];
    } else if (k == p.m) {
      z[k - 1] = p.beta[p.m] - p.beta[p.m - 1] - p.d * p.beta[p.n - 1];
    } else {
      z[k - 1] = p.beta[k] - p.beta[k - 1];
    }
  }
  return z;
}

/// (Z_plus, Z_minus): counts of strictly positive / strictly negative zeta_k.
template <typename Scalar>
std::pair<int, int> z_counts(const SelfSimilarParams<Scalar>& p) {
  const VectorX<Scalar> z = zeta(p);
  int zp = 0, zm = 0;
  for (Index k = 0; k < z.size(); ++k) {
    if (z[k] > Scalar(0)) ++zp;
    if (z[k] < Scalar(0)) ++zm;
  }
  return {zp, zm};
}

/// One atom of the jump measure: position S_m^r(alpha_k), mass d_m^r * zeta_k.
template <typename Scalar>
struct Atom {
  Scalar position;
  Scalar mass;
  int level;  // r >= 0
  int index;  // k in [1, n-1]
};

/// rho truncated at level R: atoms of levels 0..R-1 with zeta_k != 0,
/// sorted by position. `structured` marks measures produced by
/// jump_measure(); hand-built measures (see from_atoms) lack the
/// self-similar gap structure and are treated as plain level-0 data.
template <typename Scalar>
struct JumpMeasure {
  std::vector<Atom<Scalar>> atoms;
  int truncation_level = 0;
  SelfSimilarParams<Scalar> params;
  bool structured = false;

  Index size() const { return static_cast<Index>(atoms.size()); }

  /// Builds an ad-hoc measure from (position, mass) pairs, all level 0.
  static JumpMeasure from_atoms(std::vector<std::pair<Scalar, Scalar>> list) {
    std::sort(list.begin(), list.end());
    JumpMeasure jm;
    jm.truncation_level = 1;
    int k = 1;
    for (const auto& [pos, mass] : list) jm.atoms.push_back({pos, mass, 0, k++});
    return jm;
  }
};

/// Extracts the atoms of rho for levels r in [0, R). Positions are produced
/// by nested application of S_m to the exact breakpoints (the Horner form of
/// the closed expression alpha_{m-1}(1-a_m^r)/(1-a_m) + a_m^r alpha_k), so
/// level r+1 records are bit-for-bit the S_m image of level r records; no
/// floating subtraction is involved. Atoms with zeta_k = 0 are omitted, and
/// d_m = 0 truncates everything past level 0.
template <typename Scalar>
JumpMeasure<Scalar> jump_measure(const SelfSimilarParams<Scalar>& p, int R) {
  if (R < 1) throw Error(errc::index_out_of_range, "truncation level must be >= 1");
  const Breakpoints<Scalar> b = breakpoints(p);
  const VectorX<Scalar> z = zeta(p);
  const Scalar am = p.a[p.m - 1];
  const Scalar shift = b.alpha[p.m - 1];

  const int levels = (p.d == Scalar(0)) ? 1 : R;

  // Build from the deepest level outward: each pass maps the previous atom
  // list through S_m and flanks it with the level-0 atoms.
  std::vector<Atom<Scalar>> atoms;
  for (int pass = 0; pass < levels; ++pass) {
    std::vector<Atom<Scalar>> next;
    next.reserve(atoms.size() + static_cast<std::size_t>(p.n - 1));
    for (int k = 1; k <= p.m - 1; ++k) {
      if (z[k - 1] != Scalar(0)) next.push_back({b.alpha[k], z[k - 1], 0, k});
    }
    for (const Atom<Scalar>& atm : atoms) {
      next.push_back({shift + am * atm.position, p.d * atm.mass, atm.level + 1, atm.index});
    }
    for (int k = p.m; k <= p.n - 1; ++k) {
      if (z[k - 1] != Scalar(0)) next.push_back({b.alpha[k], z[k - 1], 0, k});
    }
    atoms = std::move(next);
  }

  JumpMeasure<Scalar> jm;
  jm.atoms = std::move(atoms);
  jm.truncation_level = R;
  jm.params = p;
  jm.structured = true;
  return jm;
}

/// Pointwise evaluation of P, right-continuous at the jumps. Requires
/// |d_m| < 1 near the accumulation point; the descent is finite everywhere
/// else. Accuracy: the truncated tail is bounded by tol.
template <typename Scalar>
Scalar eval_P(const SelfSimilarParams<Scalar>& p, Scalar x, Scalar tol = Scalar(1e-14)) {
  using std::abs;
  if (x < Scalar(0) || x > Scalar(1)) {
    throw Error(errc::index_out_of_range, "eval_P: x outside [0,1]");
  }
  const Breakpoints<Scalar> b = breakpoints(p);
  const Scalar beta_bound = p.beta.cwiseAbs().maxCoeff();
  // |P| <= max|beta| / (1-|d|) when |d| < 1
  const Scalar value_bound =
      (abs(p.d) < Scalar(1)) ? beta_bound / (Scalar(1) - abs(p.d)) : Scalar(0);

  Scalar value = Scalar(0);
  Scalar factor = Scalar(1);
  const int max_depth = 4096;
  for (int depth = 0; depth < max_depth; ++depth) {
    // locate the piece: [alpha_{k-1}, alpha_k), last piece closed at 1
    int k = p.n;
    for (int j = 1; j < p.n; ++j) {
      if (x < b.alpha[j]) {
        k = j;
        break;
      }
    }
    value += factor * p.beta[k - 1];
    if (k != p.m) return value;
    factor *= p.d;
    if (abs(p.d) < Scalar(1) && abs(factor) * value_bound <= tol) return value;
    x = (x - b.alpha[p.m - 1]) / p.a[p.m - 1];
    x = std::clamp(x, Scalar(0), Scalar(1));
  }
  throw Error(errc::non_convergent_evaluation,
              "|d_m| >= 1 and x lies too close to the accumulation point");
}

}  // namespace stieltjes
