#pragma once

// Flat acceleration certificates for the silent part of a net: parsing,
// a bounded greedy search, and certification through the solver.

#include "polyabs/encoder.hpp"
#include "polyabs/smt.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polyabs {

struct FlatCertificate {
  enum class Source { Searched, Imported };
  std::vector<FiringSequence> sequences;
  Source source = Source::Searched;

  TauStarPredicate tau_star(const PetriNet& net) const;
  std::string to_string(const PetriNet& net) const;
};

struct AccelParams {
  std::size_t max_seq_len = 4;
  std::size_t max_iters = 16;
  unsigned probe_timeout_ms = 5000;
};

class CertificateError : public std::runtime_error {
public:
  CertificateError(const std::string& message, std::size_t line_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + message), line(line_) {}
  std::size_t line;
};

/// Sequences of transition names: one per line, or separated by ';'.
/// Blank entries and '#' comments are skipped.
std::vector<std::vector<std::string>> parse_certificate(std::string_view text);
std::vector<std::vector<std::string>> read_certificate_file(const std::string& path);
/// Resolves names against `net`; throws CertificateError for an unknown
/// transition and NonSilentTransitionInCertificate for an observable one.
FlatCertificate resolve_certificate(const std::vector<std::vector<std::string>>& names, const PetriNet& net,
                                    FlatCertificate::Source source = FlatCertificate::Source::Imported);
FlatCertificate import_certificate(const std::string& path, const PetriNet& net);

struct SearchResult {
  enum class Status { Found, Timeout, Unknown };
  Status status = Status::Timeout;
  FlatCertificate certificate;  // last candidate, complete when Found
  std::size_t iterations = 0;
  std::string detail;
};

/// Greedy search: while Closure fails, append the first silent sequence in
/// shortlex order that covers the escaping witness. `emit_prefix` names
/// emitted scripts.
SearchResult search_certificate(const PetriNet& net, const Formula& c, const AccelParams& params,
                                const SolverConfig& solver, const std::string& emit_prefix = "search");

struct Certification {
  enum class Status { Certified, Refuted, Unknown };
  Status status = Status::Unknown;
  SolverVerdict reflexive;
  SolverVerdict closure;
  SolverVerdict fast_eq;
  std::optional<QueryKind> refuted_by;

  bool fast_eq_valid() const { return fast_eq.valid(); }
};
std::string to_string(Certification::Status s);

/// Runs Reflexive and Closure (mandatory) and FastEq (advisory) for the side.
/// `e` is oriented with the side's net first.
Certification certify(const Side& side, const Correspondence& e, Direction which, const SolverConfig& solver,
                      const std::string& emit_prefix = "cert");

}  // namespace polyabs
