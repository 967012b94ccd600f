#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stieltjes/asympt.hpp"
#include "stieltjes/tables.hpp"

#include <cmath>

using namespace stieltjes;

TEST_CASE("extract_mu: two interleaved limits on the first reference set") {
  const auto p = table_params<double>(1);
  const auto seq = converge_in_level(p, {8, 0}, 1e-8);
  const auto rep = extract_mu(p, seq);
  CHECK(rep.d_positive);
  CHECK(rep.period_positive == 2);
  REQUIRE(rep.positive.size() == 2);
  CHECK(std::abs(rep.positive[0].mu - 8.2330) <= 1e-3);
  CHECK(std::abs(rep.positive[1].mu - 14.7577) <= 1e-3);
  for (const auto& est : rep.positive) {
    CHECK(est.converged);
    CHECK(est.ratios.size() == 4);
  }
  // the k = 0 ratios are the raw eigenvalues
  CHECK(rep.positive[0].ratios[0] == doctest::Approx(4.9341).epsilon(1e-3));
  CHECK(rep.positive[1].ratios[0] == doctest::Approx(13.6598).epsilon(1e-3));
}

TEST_CASE("extract_mu: negative branch of the second reference set") {
  const auto p = table_params<double>(2);
  const auto seq = converge_in_level(p, {0, 4}, 1e-8);
  const auto rep = extract_mu(p, seq);
  CHECK(rep.period_negative == 1);
  REQUIRE(rep.negative.size() == 1);
  CHECK(std::abs(rep.negative[0].mu - 4.3458) <= 1e-3);
  CHECK(rep.negative[0].ratios[0] == doctest::Approx(5.1005).epsilon(1e-3));
}

TEST_CASE("extract_mu: shared limits across branches for a negative multiplier") {
  const auto p = table_params<double>(3);
  const auto seq = converge_in_level(p, {6, 7}, 1e-8);
  const auto rep = extract_mu(p, seq);
  CHECK_FALSE(rep.d_positive);
  CHECK(rep.period_positive == 2);
  CHECK(rep.period_negative == 2);
  REQUIRE(rep.positive.size() == 2);
  REQUIRE(rep.negative.size() == 2);
  CHECK(std::abs(rep.positive[0].mu - 4.2572) <= 1e-3);
  CHECK(std::abs(rep.positive[1].mu - 38.0535) <= 1e-3);
  CHECK(std::abs(rep.negative[0].mu - 4.2572) <= 1e-3);
  CHECK(std::abs(rep.negative[1].mu - 38.0535) <= 1e-3);
  // the limits agree across the branches
  CHECK(std::abs(rep.positive[0].mu - rep.negative[0].mu) <= 2e-3);
  CHECK(std::abs(rep.positive[1].mu - rep.negative[1].mu) <= 2e-3);
}

TEST_CASE("extract_mu error taxonomy") {
  const auto p = table_params<double>(1);
  const auto seq = converge_in_level(p, {8, 0}, 1e-8);

  SUBCASE("degenerate period") {
    auto q = p;
    q.beta << 1.0, 1.0, 2.0;  // generic zeta_1 = 0
    CHECK_THROWS_WITH_AS(extract_mu(q, seq), doctest::Contains("PeriodDegenerate"), Error);
  }
  SUBCASE("too few eigenvalues") {
    const auto short_seq = converge_in_level(p, {4, 0}, 1e-8);  // two periods only
    CHECK_THROWS_WITH_AS(extract_mu(p, short_seq), doctest::Contains("TooFewEigenvalues"), Error);
  }
  SUBCASE("absent branch") {
    // Z_minus = 0 for the first reference set: no negative spectrum to fit
    CHECK_THROWS_WITH_AS(extract_mu(p, seq, false, true), doctest::Contains("BranchAbsent"),
                         Error);
  }
}

TEST_CASE("period property: windows between mu clusters hold one period each") {
  const auto p = table_params<double>(1);
  const auto sys = assemble(jump_measure(p, 18));
  // T0 between mu_2 and 6*mu_1 separates consecutive periods
  const double T0 = std::sqrt(14.7577 * 6 * 8.2330);
  for (int k = 0; k < 3; ++k) {
    const double hi = T0 * std::pow(6.0, k + 1);
    const double lo = T0 * std::pow(6.0, k);
    CHECK(counting(sys, hi) - counting(sys, lo) == 2);
  }
}

TEST_CASE("branch symmetry: negating the offsets mirrors the spectrum") {
  for (int id : {1, 2, 3}) {
    const auto p = table_params<double>(id);
    auto q = p;
    q.beta = -p.beta;
    const auto zp = z_counts(p), zq = z_counts(q);
    CHECK(zp.first == zq.second);
    CHECK(zp.second == zq.first);
    const auto sys_p = assemble(jump_measure(p, 8));
    const auto sys_q = assemble(jump_measure(q, 8));
    const auto [npos, nneg] = zp;
    BranchRequest want_p{npos > 0 ? 2 : 0, nneg > 0 ? 2 : 0};
    BranchRequest want_q{want_p.negative, want_p.positive};
    const auto sp = eigenvalues(sys_p, want_p, 1e-13);
    const auto sq = eigenvalues(sys_q, want_q, 1e-13);
    for (Index i = 0; i < sp.positive.size(); ++i) {
      CHECK(sq.negative[i] == doctest::Approx(-sp.positive[i]).epsilon(1e-12));
    }
    for (Index i = 0; i < sp.negative.size(); ++i) {
      CHECK(sq.positive[i] == doctest::Approx(-sp.negative[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("reproduce_table: every cell within the reference tolerances") {
  for (int id : {1, 2, 3}) {
    const auto report = reproduce_table<double>(id);
    CHECK(report.all_ok);
    const std::size_t expected_rows = (id == 1) ? 8 : (id == 2) ? 4 : 12;
    CHECK(report.rows.size() == expected_rows);
    for (const auto& row : report.rows) {
      CHECK(row.value_ok);
      CHECK(row.ratio_ok);
    }
  }
}

TEST_CASE("reproduce_table: spot values from the reference tables") {
  const auto t1 = reproduce_table<double>(1);
  CHECK(t1.rows[6].value == doctest::Approx(1.78e3).epsilon(0.01));  // (l,k) = (1,3)
  CHECK(t1.rows[6].ratio == doctest::Approx(8.2330).epsilon(1e-4));
  const auto t2 = reproduce_table<double>(2);
  CHECK(t2.rows[3].value == doctest::Approx(9.39e2).epsilon(0.01));  // -lambda_{-4}
  const auto t3 = reproduce_table<double>(3);
  CHECK(t3.rows[0].value == doctest::Approx(4.31).epsilon(0.01));
  CHECK(t3.rows[1].value == doctest::Approx(38.1).epsilon(0.01));
}

TEST_CASE("ratio convergence is monotone over the last periods") {
  const auto p = table_params<double>(2);
  const auto seq = converge_in_level(p, {0, 6}, 1e-8);
  const auto rep = extract_mu(p, seq);
  for (const auto& est : rep.negative) {
    CHECK(est.converged);
    CHECK(est.error < 1e-3);
  }
}
