#pragma once

// Flat key-value parameter files for the command-line tools.
//
//   # comment
//   n = 3
//   a = 1/3, 1/3, 1/3
//   m = 3
//   d = 1/2
//   beta = 0, 2/3, 1
//
// Numbers are decimals or exact fractions p/q; fractions are preferred since
// the reference parameter sets are rational. Unknown keys are rejected.

#include "stieltjes/core.hpp"
#include "stieltjes/selfsim.hpp"

#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace stieltjes {

/// One resolved CLI invocation: parameters plus the shared command options.
struct RunConfig {
  SelfSimilarParams<double> params;
  int level = -1;           // truncation level; -1 means automatic
  double tol = 1e-8;        // convergence tolerance
  int positive = 0;         // requested positive eigenvalues
  int negative = 0;         // requested negative eigenvalues
  std::string format = "csv";  // csv | json
  std::string out;          // output path; empty means stdout
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses a decimal or an exact fraction "p/q".
inline double parse_number(const std::string& text) {
  const std::string t = detail::trim(text);
  if (t.empty()) throw Error(errc::invalid_config, "empty number");
  const auto slash = t.find('/');
  auto to_double = [](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty()) {
      throw Error(errc::invalid_config, "malformed number '" + s + "'");
    }
    return v;
  };
  if (slash == std::string::npos) return to_double(t);
  const double num = to_double(detail::trim(t.substr(0, slash)));
  const double den = to_double(detail::trim(t.substr(slash + 1)));
  if (den == 0) throw Error(errc::invalid_config, "zero denominator in '" + t + "'");
  return num / den;
}

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  return out;
}

/// Parses the key-value parameter format. The returned parameters are raw;
/// callers validate() before computing.
inline SelfSimilarParams<double> parse_params_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(errc::invalid_config, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(t.substr(0, eq));
    if (kv.count(key)) throw Error(errc::invalid_config, "duplicate key '" + key + "'");
    kv[key] = detail::trim(t.substr(eq + 1));
  }

  for (const auto& [key, value] : kv) {
    (void)value;
    if (key != "n" && key != "a" && key != "m" && key != "d" && key != "beta") {
      throw Error(errc::invalid_config, "unknown key '" + key + "'");
    }
  }
  for (const char* key : {"n", "a", "m", "d", "beta"}) {
    if (!kv.count(key)) throw Error(errc::invalid_config, std::string("missing key '") + key + "'");
  }

  SelfSimilarParams<double> p;
  p.n = static_cast<int>(parse_number(kv["n"]));
  p.m = static_cast<int>(parse_number(kv["m"]));
  p.d = parse_number(kv["d"]);
  const auto a = parse_number_list(kv["a"]);
  const auto beta = parse_number_list(kv["beta"]);
  p.a = Eigen::Map<const VectorX<double>>(a.data(), static_cast<Index>(a.size()));
  p.beta = Eigen::Map<const VectorX<double>>(beta.data(), static_cast<Index>(beta.size()));
  return p;
}

}  // namespace stieltjes
