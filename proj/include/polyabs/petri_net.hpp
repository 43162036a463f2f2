#pragma once

// Place/transition nets with labeled transitions, their firing semantics, and
// the hurdle/displacement calculus of firing sequences.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polyabs {

using Tokens = std::uint64_t;
using TransitionId = std::size_t;
using FiringSequence = std::vector<TransitionId>;

/// Transition label: either the silent action or an observable symbol.
class Label {
public:
  static Label silent() { return Label{}; }
  static Label observable(std::string symbol);

  bool is_silent() const { return !symbol_.has_value(); }
  /// Precondition: !is_silent().
  const std::string& symbol() const { return *symbol_; }

  std::string to_string() const { return symbol_ ? *symbol_ : "tau"; }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;

private:
  std::optional<std::string> symbol_;
};

/// Token count per place, positionally aligned with the owning net's places.
class Marking {
public:
  Marking() = default;
  explicit Marking(std::vector<Tokens> tokens) : tokens_(std::move(tokens)) {}

  std::size_t size() const { return tokens_.size(); }
  Tokens operator[](std::size_t place) const { return tokens_[place]; }
  Tokens& operator[](std::size_t place) { return tokens_[place]; }
  const std::vector<Tokens>& values() const { return tokens_; }

  /// Componentwise comparison.
  bool covers(const Marking& other) const;

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;

private:
  std::vector<Tokens> tokens_;
};

/// Integer vector over places (displacements, hurdles).
class IntVector {
public:
  IntVector() = default;
  explicit IntVector(std::size_t size) : values_(size, 0) {}
  explicit IntVector(std::vector<std::int64_t> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  std::int64_t operator[](std::size_t i) const { return values_[i]; }
  std::int64_t& operator[](std::size_t i) { return values_[i]; }
  const std::vector<std::int64_t>& values() const { return values_; }

  bool is_zero() const;

  friend bool operator==(const IntVector&, const IntVector&) = default;

private:
  std::vector<std::int64_t> values_;
};

struct Transition {
  std::string name;
  Label label;
  std::vector<Tokens> pre;   // indexed by place
  std::vector<Tokens> post;  // indexed by place
};

class PetriNet {
public:
  PetriNet() = default;

  /// Adds a place; throws std::invalid_argument on a duplicate name.
  std::size_t add_place(std::string name);
  /// Adds a transition; arcs name existing places. Absent places weigh 0.
  TransitionId add_transition(std::string name, Label label,
                              const std::map<std::string, Tokens>& pre,
                              const std::map<std::string, Tokens>& post);

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const Transition& transition(TransitionId t) const;

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }

  std::optional<std::size_t> find_place(std::string_view name) const;
  std::optional<TransitionId> find_transition(std::string_view name) const;
  /// Throws std::out_of_range if absent.
  std::size_t place_index(std::string_view name) const;
  TransitionId transition_index(std::string_view name) const;

  bool has_silent_transitions() const;
  /// Observable symbols in first-occurrence order.
  std::vector<std::string> alphabet() const;

  Marking zero_marking() const { return Marking(std::vector<Tokens>(places_.size(), 0)); }
  /// Builds a marking from a partial map; unlisted places hold 0 tokens.
  Marking marking(const std::map<std::string, Tokens>& tokens) const;
  std::string format(const Marking& m) const;

private:
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
};

/// Result of firing: std::nullopt means the transition (or a step of the
/// sequence) is not enabled.
std::optional<Marking> fire(const PetriNet& net, const Marking& m, TransitionId t);
std::optional<Marking> fire_sequence(const PetriNet& net, const Marking& m,
                                     const FiringSequence& sequence);

struct HurdleDelta {
  IntVector hurdle;  // componentwise >= 0
  IntVector delta;
};

/// Minimal enabling marking and token displacement of a firing sequence,
/// computed by the left-to-right composition
///   H(a.b) = max(H(a), H(b) - D(a)),  D(a.b) = D(a) + D(b).
HurdleDelta hurdle_delta(const PetriNet& net, const FiringSequence& sequence);
/// Composes the hurdle/delta of two consecutive sequences.
HurdleDelta compose(const HurdleDelta& first, const HurdleDelta& second);
/// Closed form for k iterations of a sequence with hurdle/delta `once`:
///   H(s^k) = [k > 0] * (H(s) + (k - 1) * (-D(s))^+),  D(s^k) = k * D(s).
HurdleDelta accelerate(const HurdleDelta& once, std::uint64_t k);

IntVector positive_part(const IntVector& v);

// Structural operations.

struct RemovalResult {
  PetriNet net;
  bool symbol_found = false;
};

/// Removes every transition labeled `symbol`.
RemovalResult t_minus(const PetriNet& net, std::string_view symbol);
/// Duplicates every transition labeled `from`, labeling the copies `to`.
PetriNet t_plus(const PetriNet& net, std::string_view from, std::string_view to);
/// Replaces label `symbol` by `replacement` (which may be silent).
PetriNet relabel(const PetriNet& net, std::string_view symbol, const Label& replacement);
/// Label-synchronized product over disjoint place sets. Transitions carrying a
/// symbol observable on both sides are paired; silent transitions and symbols
/// private to one side interleave. Throws std::invalid_argument on shared
/// place names.
PetriNet sync_product(const PetriNet& left, const PetriNet& right);
PetriNet rename_places(const PetriNet& net, const std::map<std::string, std::string>& renaming);

/// Equality up to transition renaming, with place names fixed.
bool structurally_equal(const PetriNet& a, const PetriNet& b);

}  // namespace polyabs
