#pragma once

// End-to-end soundness check of a reduction rule.

#include "polyabs/accel.hpp"
#include "polyabs/encoder.hpp"
#include "polyabs/oracle.hpp"
#include "polyabs/rule.hpp"
#include "polyabs/smt.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polyabs {

enum class TauStarMode { Auto, Certificate, Derived };

struct CheckOptions {
  SolverConfig solver;
  AccelParams accel;
  std::optional<std::string> cert1;  // overrides the rule directory's files
  std::optional<std::string> cert2;
  TauStarMode tau_star = TauStarMode::Auto;
  unsigned jobs = 4;
  std::optional<Bound> oracle;
};

enum class Overall { Sound, Unsound, Inconclusive };
std::string to_string(Overall o);

struct CertificateReport {
  Direction net = Direction::N1;
  FlatCertificate certificate;
  std::string text;  // sequences by transition name
  std::optional<SearchResult> search;
  std::optional<Certification> certification;
  /// Form of tau* handed to the core queries: "certificate" or "derived".
  std::string tau_star_form = "certificate";
};

struct QueryReport {
  QueryKind kind;
  Direction direction;
  SolverVerdict verdict;
};

struct OracleSummary {
  OracleReport report;
  bool disagrees = false;
  std::string note;
};

struct Verdict {
  std::string rule;
  Overall overall = Overall::Inconclusive;
  Alphabet alphabet;
  std::vector<CertificateReport> certificates;
  std::vector<QueryReport> queries;
  std::optional<std::size_t> failing;  // index into queries
  std::string narrative;
  std::optional<OracleSummary> oracle;
};

/// Certificates, certification, the eight core queries, aggregation and the
/// optional oracle cross-check. Solver trouble never throws; it yields
/// INCONCLUSIVE. Malformed certificate files throw.
Verdict check_rule(const ReductionRule& rule, const CheckOptions& options);

/// 0 sound, 1 unsound, 2 inconclusive, 4 oracle disagreement.
int exit_code(const Verdict& v);

std::string report_human(const Verdict& v, const ReductionRule& rule);
/// Stable JSON; `include_timing` false drops wall-clock fields.
std::string report_json(const Verdict& v, const ReductionRule& rule, bool include_timing = true);

}  // namespace polyabs
