#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// End-to-end tests of the command-line binary: spawn, capture, parse.

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string work_dir() {
  static std::string dir = []() {
    std::string tmpl = "/tmp/stieltjes_cli_test_XXXXXX";
    if (!mkdtemp(tmpl.data())) tmpl = "/tmp";
    return tmpl;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  const std::string out_path = work_dir() + "/stdout.txt";
  const std::string err_path = work_dir() + "/stderr.txt";
  const std::string cmd =
      std::string(STIELTJES_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out_path), slurp(err_path)};
}

std::string write_config(const std::string& name, const std::string& content) {
  const std::string path = work_dir() + "/" + name;
  std::ofstream f(path);
  f << content;
  return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

const std::string kTable1Conf = "n = 3\na = 1/3, 1/3, 1/3\nm = 3\nd = 1/2\nbeta = 0, 2/3, 1\n";
const std::string kTable2Conf = "n = 3\na = 1/3, 1/3, 1/3\nm = 3\nd = 1/2\nbeta = 0, -1, 0\n";
const std::string kSingleAtomConf = "n = 2\na = 1/2, 1/2\nm = 2\nd = 0\nbeta = 0, 1\n";

}  // namespace

TEST_CASE("validate: accepts the reference config, rejects a broken one") {
  const auto ok = run("validate --config " + write_config("t1.conf", kTable1Conf));
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("ok") != std::string::npos);

  const auto bad = run("validate --config " +
                       write_config("bad.conf",
                                    "n = 3\na = 1/3, 1/3, 1/2\nm = 3\nd = 1/2\nbeta = 0, 1, 2\n"));
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("LengthsDoNotSumToOne") != std::string::npos);
}

TEST_CASE("config errors carry a machine-parseable reason and exit code 1") {
  const auto r = run("eigs --positive 1 --config " +
                     write_config("unknown.conf", kTable1Conf + "mystery = 1\n"));
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error code=InvalidConfig") != std::string::npos);
  CHECK(r.err.find("unknown key") != std::string::npos);
}

TEST_CASE("eigs: single-atom fixture has eigenvalue 4") {
  const auto r =
      run("eigs --positive 1 --config " + write_config("single.conf", kSingleAtomConf));
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][4] == "lambda");
  CHECK(std::stod(rows[1][4]) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(std::stod(rows[1][5]) < 1e-8);  // rel_err column
}

TEST_CASE("table 1: ratio column matches the reference sequence") {
  const auto r = run("table 1");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 9);
  const double expected[] = {4.9341, 13.6598, 8.2322, 14.7576, 8.2330, 14.7577, 8.2330, 14.7577};
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(std::stod(rows[i + 1][7]) - expected[i]) <= 1e-3);
  }
}

TEST_CASE("output is byte-identical across runs") {
  const std::string a = work_dir() + "/a.csv";
  const std::string b = work_dir() + "/b.csv";
  REQUIRE(run("table 2 --out " + a).exit_code == 0);
  REQUIRE(run("table 2 --out " + b).exit_code == 0);
  const std::string ca = slurp(a);
  CHECK(!ca.empty());
  CHECK(ca == slurp(b));
}

TEST_CASE("verify: full ledger passes on the second reference set") {
  const auto r = run("verify --config " + write_config("t2.conf", kTable2Conf));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("oracle_agreement,PASS") != std::string::npos);
  CHECK(r.out.find("scaling_identity,PASS") != std::string::npos);
}

TEST_CASE("verify: remaining reference sets pass, d < 0 skips the log-shift check") {
  const auto r1 = run("verify --config " + write_config("vt1.conf", kTable1Conf));
  CHECK(r1.exit_code == 0);
  CHECK(r1.out.find("FAIL") == std::string::npos);

  const std::string t3 = "n = 3\na = 1/3, 1/3, 1/3\nm = 3\nd = -1/2\nbeta = 0, -1, 0\n";
  const auto r3 = run("verify --config " + write_config("vt3.conf", t3));
  CHECK(r3.exit_code == 0);
  CHECK(r3.out.find("FAIL") == std::string::npos);
  CHECK(r3.out.find("renormalization,SKIP") != std::string::npos);
  CHECK(r3.out.find("period_windows,PASS") != std::string::npos);
}

TEST_CASE("verify: finite-measure config (d = 0) passes with empty inner block") {
  const auto r = run("verify --config " + write_config("vs.conf", kSingleAtomConf));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("schur_additivity,PASS") != std::string::npos);
  CHECK(r.out.find("scaling_identity,SKIP") != std::string::npos);
}

TEST_CASE("verify: degenerate config yields explicit skip verdicts, exit 0") {
  const auto r = run("verify --config " +
                     write_config("vz.conf",
                                  "n = 3\na = 1/3, 1/3, 1/3\nm = 3\nd = 1/2\nbeta = 0, 0, 0\n"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("BranchEmpty") != std::string::npos);
}

TEST_CASE("degenerate config: explicit empty-spectrum verdict, exit 2") {
  const auto r = run("eigs --positive 1 --config " +
                     write_config("degen.conf",
                                  "n = 3\na = 1/3, 1/3, 1/3\nm = 3\nd = 1/2\nbeta = 0, 0, 0\n"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("BranchEmpty") != std::string::npos);
  CHECK(r.err.find("zeta") != std::string::npos);
}

TEST_CASE("eval: pointwise values of P at requested points") {
  const auto r = run("eval --config " + write_config("t1b.conf", kTable1Conf) + " 0.1 0.5 0.7");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(0.0));
  CHECK(std::stod(rows[2][1]) == doctest::Approx(2.0 / 3.0));
  CHECK(std::stod(rows[3][1]) == doctest::Approx(1.0));
}

TEST_CASE("measure: atoms with error-bound columns") {
  const auto r = run("measure --level 2 --config " + write_config("t1c.conf", kTable1Conf));
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 5);  // header + 4 atoms
  CHECK(rows[0][2] == "position");
  CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0 / 3.0));
  CHECK(std::stod(rows[4][3]) == doctest::Approx(1.0 / 6.0));  // deepest mass d * zeta_2
}

TEST_CASE("counting: counts are monotone along the emitted grid") {
  const auto r = run("counting --config " + write_config("t1d.conf", kTable1Conf));
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  long prev = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const long c = std::stol(rows[i][3]);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("json format emits a parseable array") {
  const auto r = run("mu --format json --config " + write_config("t2b.conf", kTable2Conf));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.front() == '[');
  CHECK(r.out.find("\"kind\": \"mu\"") != std::string::npos);
  CHECK(r.out.find("4.34583") != std::string::npos);
}

TEST_CASE("level option: fixed truncation level is honored") {
  const auto r =
      run("eigs --positive 1 --level 6 --config " + write_config("t1e.conf", kTable1Conf));
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  CHECK(rows[1][7] == "6");  // truncation_level column
  const auto bad = run("eigs --positive 1 --level nonsense --config " +
                       write_config("t1f.conf", kTable1Conf));
  CHECK(bad.exit_code == 1);
}
