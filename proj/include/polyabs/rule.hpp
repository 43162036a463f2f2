#pragma once

// Reduction rules: two nets, their coherency constraints and the linking
// formula E, loaded from a rule directory.

#include "polyabs/encoder.hpp"
#include "polyabs/petri_net.hpp"
#include "polyabs/presburger.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace polyabs {

struct ReductionRule {
  std::string name;
  PetriNet initial;  // N1
  PetriNet reduced;  // N2
  Formula c1;
  Formula c2;
  Formula e;
  Alphabet alphabet;
  std::optional<std::string> initial_cert_path;
  std::optional<std::string> reduced_cert_path;

  /// Recomputes the alphabet and checks variable scoping; throws RuleError.
  void validate();
};

class RuleError : public std::runtime_error {
public:
  RuleError(const std::string& file, std::size_t line, std::size_t column, const std::string& message);
  std::string file;
  std::size_t line;
  std::size_t column;
};

/// Net file: `pl <name> [(<tokens>)]`, `tr <name> [: <label>] <arcs> -> <arcs>`
/// with arcs `p` or `p*w`, `: tau` for silent transitions, `#` comments.
/// A `net <name>` line is accepted and ignored. Places referenced by arcs
/// are declared implicitly.
PetriNet parse_net(std::string_view text, const std::string& file = "<net>");

struct EquivalenceSpec {
  Formula c1;
  Formula c2;
  Formula e;
};
/// Entries `C1:`, `C2:` and `E:`. An entry continues on the following lines;
/// continuation lines are conjoined unless the break sits next to an operator.
/// Missing C1/C2 default to true; E is required.
EquivalenceSpec parse_equivalence(std::string_view text, const std::string& file = "<rule.eq>");

/// Reads initial.net, reduced.net and rule.eq, plus the optional
/// initial.cert and reduced.cert.
ReductionRule load_rule(const std::string& dir);

}  // namespace polyabs
