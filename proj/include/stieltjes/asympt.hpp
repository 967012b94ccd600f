#pragma once

// Extraction of the asymptotic constants mu_l from computed spectra.
//
// With q = a_m d_m (respectively (a_m|d_m|)^2 for d_m < 0), the branch
// eigenvalues satisfy lambda_{l + k*period} ~ mu_l * q^{-k}; the rescaled
// sequences r_l(k) = lambda_{l + k*period} * q^k therefore converge to mu_l.
// The estimator is the last ratio with a first-difference error bar; no
// extrapolation is applied since only (1 + o(1)) is available.

#include "stieltjes/core.hpp"
#include "stieltjes/selfsim.hpp"
#include "stieltjes/spectra.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace stieltjes {

template <typename Scalar>
struct MuEstimate {
  int l = 0;                   // position within the period
  std::vector<Scalar> ratios;  // r_l(k) for k = 0, 1, ...
  Scalar mu = Scalar(0);
  Scalar error = Scalar(0);    // last increment of the ratio sequence
  bool converged = false;      // increments non-increasing over the last steps
};

template <typename Scalar>
struct AsymptoticReport {
  bool d_positive = true;
  int period_positive = 0;  // Z_plus, or n-1 when d_m < 0
  int period_negative = 0;  // Z_minus, or n-1 when d_m < 0
  Scalar q_positive = Scalar(0);  // per-period multiplier applied to the ratios
  Scalar q_negative = Scalar(0);
  std::vector<MuEstimate<Scalar>> positive, negative;
};

namespace detail {

// The monotonicity verdict tolerates increments at the numerical floor:
// once the ratio increments fall to the accuracy of the eigenvalues
// themselves they jitter instead of shrinking further.
template <typename Scalar>
MuEstimate<Scalar> estimate_from_ratios(int l, std::vector<Scalar> ratios, Scalar noise_floor) {
  using std::abs;
  MuEstimate<Scalar> est;
  est.l = l;
  est.mu = ratios.back();
  est.error = abs(ratios.back() - ratios[ratios.size() - 2]);
  std::vector<Scalar> diffs;
  for (std::size_t i = 1; i < ratios.size(); ++i) diffs.push_back(abs(ratios[i] - ratios[i - 1]));
  const Scalar floor = noise_floor * abs(est.mu);
  est.converged = true;
  const std::size_t from = diffs.size() > 3 ? diffs.size() - 3 : 0;
  for (std::size_t i = from + 1; i < diffs.size(); ++i) {
    if (diffs[i] > std::max(diffs[i - 1], floor)) est.converged = false;
  }
  est.ratios = std::move(ratios);
  return est;
}

// r_l(k) = sign * seq[offset + l + k*period - 1] * scale0 * step^k
template <typename Scalar>
std::vector<MuEstimate<Scalar>> extract_branch(const VectorX<Scalar>& seq, Scalar sign, int period,
                                               int offset, Scalar scale0, Scalar step,
                                               Scalar noise_floor, const char* branch_name) {
  std::vector<MuEstimate<Scalar>> out;
  for (int l = 1; l <= period; ++l) {
    std::vector<Scalar> ratios;
    Scalar q = scale0;
    for (int k = 0;; ++k) {
      const long idx = offset + l + static_cast<long>(k) * period;  // 1-based
      if (idx > seq.size()) break;
      ratios.push_back(sign * seq[idx - 1] * q);
      q *= step;
    }
    if (ratios.size() < 3) {
      throw Error(errc::too_few_eigenvalues,
                  std::string(branch_name) + " branch needs at least three periods, got " +
                      std::to_string(ratios.size()) + " for l=" + std::to_string(l));
    }
    out.push_back(estimate_from_ratios(l, std::move(ratios), noise_floor));
  }
  return out;
}

// worst relative accuracy among the branch eigenvalues: enclosure widths
// plus the recorded truncation change
template <typename Scalar>
Scalar branch_noise(const VectorX<Scalar>& values, const VectorX<Scalar>& err,
                    const VectorX<Scalar>& rchange) {
  using std::abs;
  Scalar noise = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  for (Index i = 0; i < values.size(); ++i) {
    Scalar rel = Scalar(0);
    if (err.size() == values.size()) rel += abs(err[i]) / std::max(abs(values[i]), Scalar(1e-300));
    if (rchange.size() == values.size()) rel += rchange[i];
    noise = std::max(noise, rel);
  }
  return Scalar(4) * noise;
}

}  // namespace detail

/// Rescales the eigenvalue sequence into the per-branch ratio arrays and
/// reads off the limits mu_l. Branch selection follows the contents of `seq`
/// unless requested explicitly. Throws PeriodDegenerate when a zeta entry
/// vanishes (the period collapses), BranchAbsent when a requested branch has
/// no eigenvalues to converge to, and TooFewEigenvalues below three periods.
template <typename Scalar>
AsymptoticReport<Scalar> extract_mu(const SelfSimilarParams<Scalar>& p,
                                    const EigenSequence<Scalar>& seq, bool want_positive,
                                    bool want_negative) {
  using std::abs;
  if (p.d == Scalar(0)) {
    throw Error(errc::precondition_violated, "d_m = 0: spectrum finite, no geometric asymptotics");
  }
  const auto [zp, zm] = z_counts(p);
  if (zp + zm != p.n - 1) {
    throw Error(errc::period_degenerate, "some zeta_k = 0: Z_plus + Z_minus < n - 1");
  }

  AsymptoticReport<Scalar> report;
  report.d_positive = (p.d > Scalar(0));
  const Scalar adm = p.piece_length() * abs(p.d);
  const Scalar pos_noise =
      detail::branch_noise(seq.positive, seq.positive_err, seq.positive_rchange);
  const Scalar neg_noise =
      detail::branch_noise(seq.negative, seq.negative_err, seq.negative_rchange);

  if (report.d_positive) {
    report.period_positive = zp;
    report.period_negative = zm;
    report.q_positive = report.q_negative = adm;
    if (want_positive) {
      if (zp == 0) throw Error(errc::branch_absent, "Z_plus = 0: no positive branch for d_m > 0");
      report.positive = detail::extract_branch(seq.positive, Scalar(1), zp, 0, Scalar(1), adm,
                                               pos_noise, "positive");
    }
    if (want_negative) {
      if (zm == 0) throw Error(errc::branch_absent, "Z_minus = 0: no negative branch for d_m > 0");
      report.negative = detail::extract_branch(seq.negative, Scalar(-1), zm, 0, Scalar(1), adm,
                                               neg_noise, "negative");
    }
  } else {
    report.period_positive = report.period_negative = p.n - 1;
    report.q_positive = adm * adm;
    report.q_negative = adm * adm;
    if (want_positive) {
      report.positive = detail::extract_branch(seq.positive, Scalar(1), p.n - 1, 0, Scalar(1),
                                               adm * adm, pos_noise, "positive");
    }
    if (want_negative) {
      // indices are offset by Z_minus and the scale carries one odd power
      report.negative = detail::extract_branch(seq.negative, Scalar(-1), p.n - 1, zm, adm,
                                               adm * adm, neg_noise, "negative");
    }
  }
  return report;
}

template <typename Scalar>
AsymptoticReport<Scalar> extract_mu(const SelfSimilarParams<Scalar>& p,
                                    const EigenSequence<Scalar>& seq) {
  return extract_mu(p, seq, seq.positive.size() > 0, seq.negative.size() > 0);
}

}  // namespace stieltjes
