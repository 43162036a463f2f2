#pragma once

// Bounded explicit-state checks of coherency, the parametric abstraction
// conditions and marked-net instantiation. Results are "no counterexample
// within the bound", never proofs.

#include "polyabs/petri_net.hpp"
#include "polyabs/presburger.hpp"
#include "polyabs/rule.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace polyabs {

struct Bound {
  Tokens max_tokens = 6;
  std::size_t max_depth = 12;  // observable word length
};

struct ReachSet {
  std::set<Marking> markings;
  bool truncated = false;  // some successor exceeded the token bound
};

struct Counterexample {
  std::optional<std::string> label;  // nullopt: silent / none
  std::vector<std::string> markings;  // formatted, in the order of the description
  std::string description;
};

struct OracleResult {
  std::optional<Counterexample> counterexample;
  bool truncated = false;
  bool ok() const { return !counterexample.has_value(); }
};

/// Closure of {m} under silent transitions.
ReachSet silent_reach(const PetriNet& net, const Marking& m, const Bound& bound);
/// Closure of {m} under all transitions.
ReachSet reach(const PetriNet& net, const Marking& m, const Bound& bound);
/// m -a-> m': silent steps followed by one transition labeled `symbol`.
ReachSet observable_step(const PetriNet& net, const Marking& m, const std::string& symbol, const Bound& bound);
/// m =sigma=> m' for sigma empty (nullopt) or a single symbol.
ReachSet weak_step(const PetriNet& net, const Marking& m, const std::optional<std::string>& symbol,
                   const Bound& bound);

/// Markings with components <= max_tokens satisfying `c`.
std::vector<Marking> markings_satisfying(const PetriNet& net, const Formula& c, Tokens max_tokens);

/// Relation m1 ~E m2 between markings of two nets.
class MarkingRelation {
public:
  MarkingRelation(const Formula& e, const PetriNet& first, const PetriNet& second);
  MarkingRelation reversed() const;

  bool holds(const Marking& m1, const Marking& m2, Tokens quantifier_bound) const;
  /// Markings of the second net related to m1, components <= max_tokens.
  std::vector<Marking> related(const Marking& m1, Tokens max_tokens) const;

  const PetriNet& first() const { return *first_; }
  const PetriNet& second() const { return *second_; }

private:
  MarkingRelation(Formula e_tilde, const PetriNet* first, const PetriNet* second, bool swapped)
      : e_tilde_(std::move(e_tilde)), first_(first), second_(second), swapped_(swapped) {}
  Assignment assignment(const Marking& m1, const Marking& m2) const;

  Formula e_tilde_;  // over "n1." (initial first) and "n2."
  const PetriNet* first_;
  const PetriNet* second_;
  bool swapped_ = false;
};

OracleResult check_coherency(const PetriNet& net, const Formula& c, const Bound& bound);
/// `forward` checks N1 against N2; otherwise the roles are swapped.
OracleResult check_s1(const ReductionRule& rule, bool forward, const Bound& bound);
OracleResult check_s2(const ReductionRule& rule, bool forward, const Bound& bound);
OracleResult check_s3(const ReductionRule& rule, bool forward, const Bound& bound);
/// (N1, m1) is abstracted by (N2, m2): compatibility of the initial markings
/// and the observable-sequence condition up to bound.max_depth.
OracleResult check_instantiation(const ReductionRule& rule, const Marking& m1, const Marking& m2, const Bound& bound);

struct OracleReport {
  OracleResult coherency[2];  // N1, N2
  OracleResult s1[2];         // N1->N2, N2->N1
  OracleResult s2[2];
  OracleResult s3[2];

  bool any_counterexample() const;
};
OracleReport run_oracle(const ReductionRule& rule, const Bound& bound);

}  // namespace polyabs
