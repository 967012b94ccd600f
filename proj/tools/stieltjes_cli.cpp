// Batch front end: parameter ingestion, command dispatch, machine-readable
// output. Subcommands: validate | eval | measure | eigs | counting | mu |
// verify | table.
//
// Exit codes: 0 success, 1 invalid configuration, 2 computation failure,
// 3 verification mismatch. Errors print one machine-parseable line on stderr:
//   error code=<Name> msg="<detail>"

#include "stieltjes/asympt.hpp"
#include "stieltjes/config.hpp"
#include "stieltjes/identities.hpp"
#include "stieltjes/selfsim.hpp"
#include "stieltjes/spectra.hpp"
#include "stieltjes/tables.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace stieltjes;

int exit_code_for(errc code) {
  switch (code) {
    case errc::invalid_config:
    case errc::non_positive_length:
    case errc::lengths_do_not_sum_to_one:
    case errc::index_out_of_range:
    case errc::contraction_violated:
    case errc::too_few_pieces:
    case errc::size_mismatch:
      return 1;
    case errc::mismatch_beyond_tolerance:
    case errc::not_stabilized:
      return 3;
    default:
      return 2;
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

struct OutputTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(const OutputTable& t, std::ostream& os) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << csv_quote(t.header[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(row[i]);
    os << "\n";
  }
}

void write_json(const OutputTable& t, std::ostream& os) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj;
    for (std::size_t i = 0; i < t.header.size() && i < row.size(); ++i) obj[t.header[i]] = row[i];
    arr.push_back(obj);
  }
  os << arr.dump(2) << "\n";
}

void emit(const OutputTable& t, const RunConfig& cfg) {
  std::ostringstream body;
  if (cfg.format == "json") {
    write_json(t, body);
  } else {
    write_csv(t, body);
  }
  if (cfg.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw Error(errc::invalid_config, "cannot open output path '" + cfg.out + "'");
    f << body.str();
  }
}

SelfSimilarParams<double> load_params(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(errc::invalid_config, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_params_text(ss.str());
}

// l, k, ratio decomposition of a branch eigenvalue per the applicable
// asymptotic case; nullopt when the index precedes the pattern.
struct RatioCell {
  int l, k;
  double ratio;
};

std::optional<RatioCell> decompose(const SelfSimilarParams<double>& p, bool negative_branch,
                                   long index, double lambda) {
  const auto [zp, zm] = z_counts(p);
  if (p.d == 0.0 || zp + zm != p.n - 1) return std::nullopt;
  const double adm = p.piece_length() * std::abs(p.d);
  int period;
  long shifted = index;
  double scale;
  if (p.d > 0.0) {
    period = negative_branch ? zm : zp;
    if (period == 0) return std::nullopt;
    const int k = static_cast<int>((shifted - 1) / period);
    const int l = static_cast<int>(shifted - static_cast<long>(k) * period);
    scale = std::pow(adm, k);
    return RatioCell{l, k, std::abs(lambda) * scale};
  }
  period = p.n - 1;
  if (negative_branch) {
    shifted = index - zm;
    if (shifted < 1) return std::nullopt;
    const int k = static_cast<int>((shifted - 1) / period);
    const int l = static_cast<int>(shifted - static_cast<long>(k) * period);
    scale = std::pow(adm, 2 * k + 1);
    return RatioCell{l, k, std::abs(lambda) * scale};
  }
  const int k = static_cast<int>((shifted - 1) / period);
  const int l = static_cast<int>(shifted - static_cast<long>(k) * period);
  scale = std::pow(adm, 2 * k);
  return RatioCell{l, k, std::abs(lambda) * scale};
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_validate(const RunConfig& cfg) {
  OutputTable t;
  t.header = {"status", "code", "detail"};
  const auto violations = check(cfg.params);
  if (violations.empty()) {
    t.add({"ok", "", ""});
  } else {
    for (const auto& v : violations) t.add({"violation", errc_name(v.code), v.detail});
  }
  emit(t, cfg);
  return violations.empty() ? 0 : 1;
}

int cmd_eval(const RunConfig& cfg, const std::vector<std::string>& xs, bool tol_given) {
  const auto p = validate(cfg.params);
  std::vector<double> grid;
  if (xs.empty()) {
    for (int i = 0; i <= 256; ++i) grid.push_back(double(i) / 256.0);
  } else {
    for (const auto& s : xs) grid.push_back(parse_number(s));
  }
  const double tol = tol_given ? cfg.tol : 1e-12;
  OutputTable t;
  t.header = {"x", "P", "abs_err"};
  for (double x : grid) t.add({fmt(x), fmt(eval_P(p, x, tol)), fmt(tol)});
  emit(t, cfg);
  return 0;
}

int cmd_measure(const RunConfig& cfg) {
  const auto p = validate(cfg.params);
  const int R = cfg.level > 0 ? cfg.level : 4;
  const auto jm = jump_measure(p, R);
  const double eps = std::numeric_limits<double>::epsilon();
  OutputTable t;
  t.header = {"level", "index", "position", "mass", "position_err", "mass_err"};
  for (const auto& atm : jm.atoms) {
    // closed-form records accumulate one rounding per level
    const double bound = (atm.level + 2) * eps;
    t.add({fmt(atm.level), fmt(atm.index), fmt(atm.position), fmt(atm.mass),
           fmt(bound * std::abs(atm.position)), fmt(bound * std::abs(atm.mass))});
  }
  emit(t, cfg);
  return 0;
}

int cmd_eigs(const RunConfig& cfg) {
  const auto p = validate(cfg.params);
  if (cfg.positive == 0 && cfg.negative == 0) {
    throw Error(errc::invalid_config, "request at least one eigenvalue (--positive/--negative)");
  }
  BranchRequest want{cfg.positive, cfg.negative};
  EigenSequence<double> seq;
  if (cfg.level > 0) {
    seq = eigenvalues(assemble(jump_measure(p, cfg.level)), want, cfg.tol);
  } else {
    seq = converge_in_level(p, want, cfg.tol);
  }

  OutputTable t;
  t.header = {"branch", "l", "k", "index", "lambda", "rel_err", "ratio", "truncation_level"};
  auto emit_branch = [&](bool negative, const VectorX<double>& vals, const VectorX<double>& errs,
                         const VectorX<double>& rchange) {
    for (Index i = 0; i < vals.size(); ++i) {
      const long index = static_cast<long>(i) + 1;
      double rel = errs.size() ? std::abs(errs[i] / vals[i]) : 0.0;
      if (rchange.size()) rel = std::max(rel, rchange[i]);
      const auto cell = decompose(p, negative, index, vals[i]);
      t.add({negative ? "negative" : "positive", cell ? fmt(cell->l) : fmt(index),
             cell ? fmt(cell->k) : "0", fmt(index), fmt(vals[i]), fmt(rel),
             cell ? fmt(cell->ratio) : "", fmt(seq.truncation_level)});
    }
  };
  emit_branch(false, seq.positive, seq.positive_err, seq.positive_rchange);
  emit_branch(true, seq.negative, seq.negative_err, seq.negative_rchange);
  emit(t, cfg);
  return 0;
}

int cmd_counting(const RunConfig& cfg) {
  const auto p = validate(cfg.params);
  const int R = cfg.level > 0 ? cfg.level : 12;
  const auto sys = assemble(jump_measure(p, R));
  OutputTable t;
  t.header = {"branch", "t", "lambda", "count"};
  const bool has_pos = (sys.masses.array() > 0.0).any();
  const bool has_neg = (sys.masses.array() < 0.0).any();
  for (int j = 0; j <= 24; ++j) {
    const double lambda = std::pow(10.0, double(j) / 4.0);
    if (has_pos) t.add({"positive", fmt(std::log(lambda)), fmt(lambda), fmt(counting(sys, lambda))});
  }
  for (int j = 0; j <= 24; ++j) {
    const double lambda = std::pow(10.0, double(j) / 4.0);
    if (has_neg) {
      t.add({"negative", fmt(std::log(lambda)), fmt(-lambda), fmt(counting(sys, -lambda))});
    }
  }
  emit(t, cfg);
  return 0;
}

int cmd_mu(const RunConfig& cfg) {
  const auto p = validate(cfg.params);
  if (p.d == 0.0) {
    throw Error(errc::precondition_violated, "d_m = 0: spectrum finite, no geometric asymptotics");
  }
  const auto [zp, zm] = z_counts(p);
  BranchRequest want{cfg.positive, cfg.negative};
  if (want.positive == 0 && want.negative == 0) {
    // default: four periods per branch (plus the negative-branch offset)
    if (p.d > 0) {
      want.positive = 4 * zp;
      want.negative = 4 * zm;
    } else if (zp + zm > 0) {
      want.positive = 4 * (p.n - 1);
      want.negative = 4 * (p.n - 1) + zm;
    }
  }
  const auto seq = converge_in_level(p, want, cfg.tol);
  const auto rep = extract_mu(p, seq, want.positive > 0, want.negative > 0);

  OutputTable t;
  t.header = {"kind", "branch", "l", "k", "index", "lambda", "ratio", "mu", "err", "converged"};
  auto emit_branch = [&](bool negative, const std::vector<MuEstimate<double>>& ests,
                         const VectorX<double>& vals, int period, int offset) {
    for (const auto& est : ests) {
      for (std::size_t k = 0; k < est.ratios.size(); ++k) {
        const long index = offset + est.l + static_cast<long>(k) * period;
        t.add({"ratio", negative ? "negative" : "positive", fmt(est.l), fmt(static_cast<long>(k)),
               fmt(index), fmt(vals[index - 1]), fmt(est.ratios[k]), "", "", ""});
      }
    }
    for (const auto& est : ests) {
      t.add({"mu", negative ? "negative" : "positive", fmt(est.l), "", "", "", "", fmt(est.mu),
             fmt(est.error), est.converged ? "1" : "0"});
    }
  };
  const int neg_offset = (p.d < 0) ? zm : 0;
  emit_branch(false, rep.positive, seq.positive, rep.period_positive, 0);
  emit_branch(true, rep.negative, seq.negative, rep.period_negative, neg_offset);
  emit(t, cfg);
  return 0;
}

int cmd_table(const RunConfig& cfg, int id) {
  const auto report = reproduce_table<double>(id);
  OutputTable t;
  t.header = {"branch", "l", "k", "index", "value", "value_ref", "value_ok",
              "ratio", "ratio_ref", "ratio_ok", "rel_err", "truncation_level"};
  for (const auto& row : report.rows) {
    t.add({row.negative_branch ? "negative" : "positive", fmt(row.l), fmt(row.k), fmt(row.index),
           fmt(row.value), fmt(row.value_ref), row.value_ok ? "1" : "0", fmt(row.ratio),
           fmt(row.ratio_ref), row.ratio_ok ? "1" : "0", fmt(row.rel_err),
           fmt(report.truncation_level)});
  }
  emit(t, cfg);
  if (!report.all_ok) {
    std::cerr << "error code=MismatchBeyondTolerance msg=\"table " << id
              << " cells off tolerance\"\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: the full identity suite as a pass/fail ledger

struct Ledger {
  OutputTable t;
  bool any_fail = false;

  Ledger() { t.header = {"check", "result", "detail"}; }
  void pass(const std::string& name, const std::string& detail = "") { t.add({name, "PASS", detail}); }
  void fail(const std::string& name, const std::string& detail = "") {
    t.add({name, "FAIL", detail});
    any_fail = true;
  }
  void skip(const std::string& name, const std::string& detail) { t.add({name, "SKIP", detail}); }
};

int cmd_verify(const RunConfig& cfg) {
  Ledger ledger;
  const auto violations = check(cfg.params);
  if (!violations.empty()) {
    throw Error(violations.front().code, violations.front().detail);
  }
  const auto p = cfg.params;
  const auto [zp, zm] = z_counts(p);
  const bool full_period = (zp + zm == p.n - 1);
  const auto z = zeta(p);
  const bool empty_measure = (z.array() == 0.0).all();
  const double adm = p.piece_length() * std::abs(p.d);

  // two-way agreement of the hat-basis form matrix
  {
    std::mt19937_64 rng(2718281828);
    std::uniform_real_distribution<double> lpick(-1e3, 1e3);
    double worst = 0;
    bool ok = true;
    std::string detail;
    std::vector<double> grid = {1, -1, 10, -10, 100, -100, 1000, -1000};
    for (int i = 0; i < 8; ++i) grid.push_back(lpick(rng));
    for (double lambda : grid) {
      try {
        worst = std::max(worst, c_form(p, lambda, 5).max_abs_diff);
      } catch (const Error& e) {
        ok = false;
        detail = e.what();
      }
    }
    if (ok) {
      ledger.pass("c_form_two_way", "max diff " + fmt(worst));
    } else {
      ledger.fail("c_form_two_way", detail);
    }
  }

  // saturation of the negative index of C(lambda)
  if (!full_period) {
    ledger.skip("ind_c_saturates", "zeta degenerate: Z+ + Z- < n-1");
  } else {
    try {
      const auto cert = ind_c_large_lambda(p);
      if (cert.z_plus == zp) {
        ledger.pass("ind_c_saturates", "Z+ = " + fmt(zp) + " from lambda* = " + fmt(cert.lambda_star));
      } else {
        ledger.fail("ind_c_saturates", "stabilized at " + fmt(cert.z_plus));
      }
    } catch (const Error& e) {
      ledger.fail("ind_c_saturates", e.what());
    }
  }

  // O(1/lambda) decay of the inverse
  if (!full_period) {
    ledger.skip("c_inverse_norm_bounded", "zeta degenerate");
  } else {
    std::vector<double> grid = {1e2, 1e3, 1e4, 1e5, 1e6};
    try {
      auto rep = c_inverse_norm(p, grid);
      if (rep.bounded_tail) {
        ledger.pass("c_inverse_norm_bounded");
      } else {
        ledger.fail("c_inverse_norm_bounded", "lambda*norm tail not flat");
      }
    } catch (const Error&) {
      for (auto& g : grid) g *= 1.37;  // step off the finite spectrum of C
      const auto rep = c_inverse_norm(p, grid);
      if (rep.bounded_tail) {
        ledger.pass("c_inverse_norm_bounded", "grid shifted off the spectrum of C");
      } else {
        ledger.fail("c_inverse_norm_bounded", "lambda*norm tail not flat");
      }
    }
  }

  // Schur inertia additivity on the canonical level partition
  if (empty_measure) {
    ledger.skip("schur_additivity", "BranchEmpty: all zeta are zero, nothing to assemble");
  } else {
    const int R = cfg.level > 1 ? cfg.level : 8;
    const auto sys = assemble(jump_measure(p, R));
    const auto part = level_partition(sys);
    int checked = 0, failed = 0, singular = 0;
    for (int j = 0; j < 50; ++j) {
      const double mag = 0.1 * std::pow(1.32, j);
      for (double lambda : {mag, -mag}) {
        try {
          if (!schur_identity_check(sys, part, lambda).holds) ++failed;
          ++checked;
        } catch (const Error&) {
          ++singular;
        }
      }
    }
    if (failed == 0 && checked >= 80) {
      ledger.pass("schur_additivity", fmt(checked) + " lambdas, " + fmt(singular) + " singular skipped");
    } else {
      ledger.fail("schur_additivity", fmt(failed) + " of " + fmt(checked) + " lambdas failed");
    }
  }

  // one-level scaling identity
  if (empty_measure) {
    ledger.skip("scaling_identity", "BranchEmpty: all zeta are zero");
  } else if ((p.m >= 2 && z[p.m - 2] == 0.0) || (p.m <= p.n - 1 && z[p.m - 1] == 0.0)) {
    ledger.skip("scaling_identity", "no atom at a recursive-piece boundary");
  } else if (p.d == 0.0) {
    ledger.skip("scaling_identity", "d_m = 0: single level only");
  } else {
    const int R = cfg.level > 1 ? cfg.level : 8;
    int failed = 0;
    for (int j = 0; j < 50; ++j) {
      const double mag = 0.1 * std::pow(1.32, j);
      if (!scaling_identity_check(p, R, mag).holds) ++failed;
      if (!scaling_identity_check(p, R, -mag).holds) ++failed;
    }
    if (failed == 0) {
      ledger.pass("scaling_identity", "100 lambdas at R = " + fmt(R));
    } else {
      ledger.fail("scaling_identity", fmt(failed) + " lambdas failed");
    }
  }

  // renormalization of the counting function (d > 0 only)
  if (p.d <= 0.0 || !full_period) {
    ledger.skip("renormalization",
                p.d == 0.0  ? "d_m = 0: s eventually constant"
                : p.d < 0.0 ? "requires d_m > 0"
                            : "zeta degenerate");
  } else {
    bool ok = true;
    std::string detail;
    for (const bool negative : {false, true}) {
      const int period = negative ? zm : zp;
      if (period == 0) continue;
      const auto branch = negative ? SpectralBranch::negative : SpectralBranch::positive;
      BranchRequest want;
      (negative ? want.negative : want.positive) = period + 1;
      const auto seq = converge_in_level(p, want, 1e-8);
      const auto& vals = negative ? seq.negative : seq.positive;
      const double T0 = std::sqrt(std::abs(vals[period - 1] * vals[period]));
      std::vector<double> grid;
      for (int j = 1; j <= 3; ++j) grid.push_back(std::log(T0) + j * std::log(1.0 / adm));
      const auto rep = renormalization_check(p, grid, branch);
      if (!rep.holds_everywhere) {
        ok = false;
        detail = std::string(negative ? "negative" : "positive") + " branch: " + rep.verdict;
      }
    }
    if (ok) {
      ledger.pass("renormalization", "difference equals the branch period on both branches");
    } else {
      ledger.fail("renormalization", detail);
    }
  }

  // three-route oracle agreement
  if (empty_measure) {
    ledger.skip("oracle_agreement", "BranchEmpty: empty spectrum, all zeta are zero");
  } else {
    const int R = cfg.level > 1 ? std::min(cfg.level, 12) : 10;
    const auto sys = assemble(jump_measure(p, R));
    BranchRequest want{
        static_cast<int>(std::min<Index>(2, (sys.masses.array() > 0.0).count())),
        static_cast<int>(std::min<Index>(2, (sys.masses.array() < 0.0).count()))};
    bool ok = true;
    std::string detail;
    try {
      const auto bis = eigenvalues(sys, want, 1e-12);
      const auto dense = eigs_dense(sys);
      auto bracket = [&](double lambda) {
        return shooting_det(sys, lambda * (1 - 1e-10)) * shooting_det(sys, lambda * (1 + 1e-10)) <
               0.0;
      };
      auto check_branch = [&](const VectorX<double>& b, const VectorX<double>& d) {
        for (Index i = 0; i < b.size(); ++i) {
          if (std::abs(d[i] - b[i]) > 1e-10 * std::abs(b[i])) {
            ok = false;
            detail = "dense route deviates at index " + fmt(static_cast<long>(i + 1));
          }
          if (!bracket(b[i]) || !bracket(d[i])) {
            ok = false;
            detail = "no shooting sign change at index " + fmt(static_cast<long>(i + 1));
          }
        }
      };
      check_branch(bis.positive, dense.positive);
      check_branch(bis.negative, dense.negative);
    } catch (const Error& e) {
      ok = false;
      detail = e.what();
    }
    if (ok) {
      ledger.pass("oracle_agreement", "bisection, dense and shooting agree to 1e-10");
    } else {
      ledger.fail("oracle_agreement", detail);
    }
  }

  // geometric period of the branch spectra
  if (empty_measure || !full_period || p.d == 0.0) {
    ledger.skip("period_windows", empty_measure ? "empty spectrum"
                                  : p.d == 0.0  ? "d_m = 0: spectrum finite, no geometric periods"
                                                : "zeta degenerate");
  } else {
    bool ok = true;
    std::string detail;
    const double qstep = (p.d > 0) ? 1.0 / adm : 1.0 / (adm * adm);
    for (const bool negative : {false, true}) {
      const int period = (p.d > 0) ? (negative ? zm : zp) : p.n - 1;
      if (period == 0) continue;
      BranchRequest want;
      (negative ? want.negative : want.positive) = period + 1 + (negative && p.d < 0 ? zm : 0);
      const auto seq = converge_in_level(p, want, 1e-8);
      const auto& vals = negative ? seq.negative : seq.positive;
      const Index base = (negative && p.d < 0) ? zm : 0;
      const double T0 = std::sqrt(std::abs(vals[base + period - 1] * vals[base + period]));
      const double sign = negative ? -1.0 : 1.0;
      const auto sys = assemble(jump_measure(p, 24));
      for (int j = 0; j < 3; ++j) {
        const double lo = T0 * std::pow(qstep, j);
        const double hi = T0 * std::pow(qstep, j + 1);
        const auto got = counting(sys, sign * hi) - counting(sys, sign * lo);
        if (got != period) {
          ok = false;
          detail = std::string(negative ? "negative" : "positive") + " window " + fmt(j) +
                   " holds " + fmt(static_cast<long>(got)) + " eigenvalues, expected " +
                   fmt(period);
        }
      }
    }
    if (ok) {
      ledger.pass("period_windows", "each geometric window holds one period of eigenvalues");
    } else {
      ledger.fail("period_windows", detail);
    }
  }

  emit(ledger.t, cfg);
  return ledger.any_fail ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of strings with self-similar atomic mass distributions"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string level_str = "auto";
  std::vector<std::string> eval_points;
  int table_id = 1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "parameter file (key = value)");
    if (needs_config) opt->required();
    sub->add_option("--level", level_str, "truncation level R or 'auto'");
    sub->add_option("--tol", cfg.tol, "convergence tolerance");
    sub->add_option("--format", cfg.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "output path (default stdout)");
  };

  auto* sc_validate = app.add_subcommand("validate", "check parameter invariants");
  add_common(sc_validate, true);
  auto* sc_eval = app.add_subcommand("eval", "evaluate the self-similar function P");
  add_common(sc_eval, true);
  sc_eval->add_option("x", eval_points, "evaluation points (default: uniform grid)");
  auto* sc_measure = app.add_subcommand("measure", "dump the atoms of the jump measure");
  add_common(sc_measure, true);
  auto* sc_eigs = app.add_subcommand("eigs", "compute eigenvalues with error bounds");
  add_common(sc_eigs, true);
  sc_eigs->add_option("--positive", cfg.positive, "number of positive eigenvalues");
  sc_eigs->add_option("--negative", cfg.negative, "number of negative eigenvalues");
  auto* sc_counting = app.add_subcommand("counting", "eigenvalue counting function on a log grid");
  add_common(sc_counting, true);
  auto* sc_mu = app.add_subcommand("mu", "extract the asymptotic constants mu_l");
  add_common(sc_mu, true);
  sc_mu->add_option("--positive", cfg.positive, "positive eigenvalues to use");
  sc_mu->add_option("--negative", cfg.negative, "negative eigenvalues to use");
  auto* sc_verify = app.add_subcommand("verify", "run the identity suite, print a pass/fail ledger");
  add_common(sc_verify, true);
  auto* sc_table = app.add_subcommand("table", "reproduce a golden reference table");
  add_common(sc_table, false);
  sc_table->add_option("id", table_id, "table number")->required()->check(CLI::Range(1, 3));

  CLI11_PARSE(app, argc, argv);

  try {
    if (level_str != "auto") {
      try {
        cfg.level = std::stoi(level_str);
      } catch (const std::exception&) {
        throw Error(errc::invalid_config, "--level expects an integer or 'auto'");
      }
      if (cfg.level < 1) throw Error(errc::invalid_config, "--level must be >= 1");
    }
    if (!config_path.empty()) cfg.params = load_params(config_path);

    if (sc_validate->parsed()) return cmd_validate(cfg);
    if (sc_eval->parsed()) return cmd_eval(cfg, eval_points, sc_eval->count("--tol") > 0);
    if (sc_measure->parsed()) return cmd_measure(cfg);
    if (sc_eigs->parsed()) return cmd_eigs(cfg);
    if (sc_counting->parsed()) return cmd_counting(cfg);
    if (sc_mu->parsed()) return cmd_mu(cfg);
    if (sc_verify->parsed()) return cmd_verify(cfg);
    if (sc_table->parsed()) return cmd_table(cfg, table_id);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error code=" << e.code_name() << " msg=\"" << e.what() << "\"\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error code=Internal msg=\"" << e.what() << "\"\n";
    return 2;
  }
}
