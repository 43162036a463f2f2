#pragma once

// Linear Presburger formulas over natural-valued variables.
//
// Formula values are immutable and cheap to copy (shared nodes). The smart
// constructors perform light simplification only: constant folding and
// flattening of nested conjunctions/disjunctions.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyabs {

using Assignment = std::map<std::string, std::uint64_t>;

/// c0 + sum_i c_i * v_i with int64 coefficients; zero coefficients are dropped.
class LinearTerm {
public:
  LinearTerm() = default;
  LinearTerm(std::int64_t constant) : constant_(constant) {}  // NOLINT: implicit by intent
  static LinearTerm var(std::string name, std::int64_t coefficient = 1);

  const std::map<std::string, std::int64_t>& coefficients() const { return coeffs_; }
  std::int64_t constant() const { return constant_; }
  bool is_constant() const { return coeffs_.empty(); }

  LinearTerm& operator+=(const LinearTerm& other);
  LinearTerm& operator-=(const LinearTerm& other);
  LinearTerm scaled(std::int64_t factor) const;

  friend LinearTerm operator+(LinearTerm a, const LinearTerm& b) { return a += b; }
  friend LinearTerm operator-(LinearTerm a, const LinearTerm& b) { return a -= b; }

  LinearTerm substitute(const std::map<std::string, LinearTerm>& map) const;
  std::string to_string() const;

  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
  friend auto operator<=>(const LinearTerm&, const LinearTerm&) = default;

private:
  std::map<std::string, std::int64_t> coeffs_;
  std::int64_t constant_ = 0;
};

enum class Relation { Eq, Le, Lt, Ge, Gt };

class Formula {
public:
  enum class Kind { True, False, Compare, Not, And, Or, Implies, Iff, Exists, Forall };

  Formula();  // true

  static Formula top();
  static Formula bottom();
  static Formula compare(LinearTerm lhs, Relation rel, LinearTerm rhs);
  static Formula negate(Formula f);
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula implies(Formula premise, Formula conclusion);
  static Formula iff(Formula a, Formula b);
  static Formula exists(std::vector<std::string> vars, Formula body);
  static Formula forall(std::vector<std::string> vars, Formula body);

  Kind kind() const;
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }

  // Accessors; each is valid only for the matching kind.
  Relation relation() const;
  const LinearTerm& lhs() const;
  const LinearTerm& rhs() const;
  std::span<const Formula> children() const;
  const std::vector<std::string>& bound_vars() const;
  const Formula& body() const;

  std::set<std::string> free_vars() const;
  bool has_quantifiers() const;
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node;
  static Formula quantifier(Kind kind, std::vector<std::string> vars, Formula body);
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Convenience builders.
Formula eq(LinearTerm a, LinearTerm b);
Formula le(LinearTerm a, LinearTerm b);
Formula lt(LinearTerm a, LinearTerm b);
Formula ge(LinearTerm a, LinearTerm b);
Formula gt(LinearTerm a, LinearTerm b);

class UnboundedQuantifier : public std::runtime_error {
public:
  explicit UnboundedQuantifier(const std::string& what) : std::runtime_error(what) {}
};

class UnassignedVariable : public std::runtime_error {
public:
  explicit UnassignedVariable(const std::string& var)
      : std::runtime_error("variable '" + var + "' has no value"), variable(var) {}
  std::string variable;
};

/// Truth of `f` under `a`. Quantifiers range over 0..*quantifier_bound; without
/// a bound, reaching a quantifier throws UnboundedQuantifier.
bool eval(const Formula& f, const Assignment& a, std::optional<std::uint64_t> quantifier_bound = std::nullopt);

/// Capture-avoiding substitution of free variables.
Formula substitute(const Formula& f, const std::map<std::string, LinearTerm>& map);
/// Substitution by variables only.
Formula rename_free(const Formula& f, const std::map<std::string, std::string>& renaming);

/// The formula whose unique model over the domain of `m` is `m`.
Formula equalities(const Assignment& m);

/// Renames bound variables so that no quantifier shadows another binder or a
/// free variable. Deterministic.
Formula rename_apart(const Formula& f);

/// Every assignment of `vars` into 0..bound satisfying `f`, in lexicographic
/// order of `vars`. Requires vars to cover free_vars(f).
std::vector<Assignment> models_within_bound(const Formula& f, const std::vector<std::string>& vars,
                                            std::uint64_t bound);
/// First model in the same order, if any. Variables already assigned in
/// `fixed` keep their value.
std::optional<Assignment> find_model(const Formula& f, const std::vector<std::string>& vars, std::uint64_t bound,
                                     const Assignment& fixed = {});

/// Builds Ẽ: variables of E naming places of the first net are moved to the
/// `first_ns` namespace, places of the second net to `second_ns`; a place
/// present in both nets yields the extra equality first_ns.p = second_ns.p.
/// Bound variables of E are renamed into the "e." namespace. Throws
/// std::invalid_argument if E has a free variable outside both place sets.
Formula build_e_tilde(const Formula& e, const std::vector<std::string>& first_places,
                      const std::vector<std::string>& second_places, std::string_view first_ns = "n1",
                      std::string_view second_ns = "n2");

// Textual syntax.

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line;
  std::size_t column;
};

/// Parses the textual formula syntax. `line_offset` shifts reported line
/// numbers when the text is embedded in a larger file.
Formula parse_formula(std::string_view text, std::size_t line_offset = 0);

}  // namespace polyabs
