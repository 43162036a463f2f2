#pragma once

// Symbolic encoding of net semantics and of the requirements that make a
// pair of constrained nets an E-abstraction.
//
// Place vectors live in namespaces: the variable for place p in namespace
// "n1" is "n1.p". Predicates over two vectors are built as templates over
// the namespaces "src" and "dst" and instantiated by capture-avoiding
// renaming, so nested uses never clash.

#include "polyabs/petri_net.hpp"
#include "polyabs/presburger.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyabs {

inline constexpr std::string_view kSrc = "src";
inline constexpr std::string_view kDst = "dst";
inline constexpr std::string_view kLabelVar = "lbl";

std::string place_var(std::string_view ns, std::string_view place);
/// `ns` followed by n apostrophes.
std::string primed(std::string_view ns, int n);
std::vector<std::string> vector_vars(const PetriNet& net, std::string_view ns);
/// Renames raw place names of a marking predicate into namespace `ns`.
Formula at(const Formula& predicate, const PetriNet& net, std::string_view ns);
/// Moves every variable of namespace `from` to namespace `to`.
Formula move_namespace(const Formula& f, const PetriNet& net, std::string_view from, std::string_view to);
Formula vectors_equal(const PetriNet& net, std::string_view a, std::string_view b);

/// Observable symbols of a rule with codes 1..size() in alphabetical order.
class Alphabet {
public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);
  static Alphabet of(const PetriNet& a, const PetriNet& b);

  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  /// 0 for silent; throws std::out_of_range for a symbol outside the alphabet.
  std::int64_t code(const Label& label) const;
  std::int64_t code(std::string_view symbol) const;
  /// Inverse of code; "tau" for 0.
  std::string symbol(std::int64_t code) const;

private:
  std::vector<std::string> symbols_;
};

class NonSilentTransitionInCertificate : public std::invalid_argument {
public:
  explicit NonSilentTransitionInCertificate(const std::string& transition)
      : std::invalid_argument("certificate uses observable transition '" + transition + "'") {}
};

enum class TauStarSource { Searched, Imported, Derived };
std::string to_string(TauStarSource s);

/// Silent reachability predicate over the namespaces src/dst.
struct TauStarPredicate {
  Formula formula;
  TauStarSource source = TauStarSource::Searched;

  Formula apply(const PetriNet& net, std::string_view from, std::string_view to) const;
};

/// Oriented view of the variable-split relation: `first` names the net whose
/// vector comes first in apply().
struct Correspondence {
  Formula e_tilde;  // over first_ns / second_ns
  const PetriNet* first = nullptr;
  const PetriNet* second = nullptr;
  std::string first_ns = "n1";
  std::string second_ns = "n2";

  static Correspondence build(const Formula& e, const PetriNet& first, const PetriNet& second);
  Formula apply(std::string_view first_vec, std::string_view second_vec) const;
  Correspondence reversed() const;
};

Formula enbl(const PetriNet& net, TransitionId t, std::string_view ns = kSrc);
Formula delta(const PetriNet& net, TransitionId t, std::string_view src = kSrc, std::string_view dst = kDst);
/// Observable firing: some t with code(l(t)) = label fires src -> dst.
Formula trans_pred(const PetriNet& net, const Alphabet& alphabet, std::string_view src = kSrc,
                   std::string_view dst = kDst, std::string_view label = kLabelVar);
/// One silent step.
Formula tau_step(const PetriNet& net, std::string_view src = kSrc, std::string_view dst = kDst);

TauStarPredicate tau_star_from_certificate(const PetriNet& net, const std::vector<FiringSequence>& sequences,
                                           TauStarSource source = TauStarSource::Searched);
/// exists q. E~(src, q) and E~(dst, q), for the net that comes first in `e`.
TauStarPredicate tau_star_derived(const Correspondence& e);

/// Silent prefix then one observable transition labeled `label`.
Formula tleft(const PetriNet& net, const Alphabet& alphabet, const TauStarPredicate& tau, std::string_view src,
              std::string_view dst, std::string_view label = kLabelVar);
/// Observable step through a C-marking followed by silent steps, or a purely
/// silent run when label = 0.
Formula that(const PetriNet& net, const Alphabet& alphabet, const Formula& c, const TauStarPredicate& tau,
             std::string_view src, std::string_view dst, std::string_view label = kLabelVar);
/// C1(first) and E~(first, second) and C2(second).
Formula cec_pred(const Formula& c1, const Correspondence& e, const Formula& c2, std::string_view first_vec,
                 std::string_view second_vec);

enum class QueryKind { Core0, Core1, Core2, Core3, CertReflexive, CertClosure, CertFastEq };
enum class Direction { N1, N2, N1ToN2, N2ToN1 };
std::string to_string(QueryKind k);
std::string to_string(Direction d);

struct CoreQuery {
  QueryKind kind;
  Direction direction;
  Formula formula;  // closed

  std::string name() const;  // e.g. "Core2 N1->N2"
};

/// Side of a rule seen from one net: the net, its constraint over raw place
/// names, its namespace stem ("n1" or "n2") and its silent reachability.
struct Side {
  const PetriNet* net = nullptr;
  Formula constraint;
  std::string ns;
  TauStarPredicate tau;
};

CoreQuery core0(const Side& side, const Alphabet& alphabet, Direction which);
/// `e` oriented from `from.net` to `to.net`.
CoreQuery core1(const Side& from, const Correspondence& e, const Side& to, Direction d);
CoreQuery core2(const Side& from, const Correspondence& e, const Side& to, Direction d);
CoreQuery core3(const Side& from, const Correspondence& e, const Side& to, const Alphabet& alphabet, Direction d);

/// forall x. C(x) => tau*(x, x)
CoreQuery reflexive_query(const Side& side, Direction which);
/// forall x, x', x''. C(x) and tau*(x, x') and tau(x', x'') => tau*(x, x'').
/// The three vectors use namespaces primed(ns, 0..2).
CoreQuery closure_query(const Side& side, Direction which);
/// forall p, p'. C(p) => ((exists q. E~(p, q) and E~(p', q)) <=> tau*(p, p'))
CoreQuery fast_eq_query(const Side& side, const Correspondence& e, Direction which);
/// Reflexive, Closure and FastEq for one net. `e` is oriented with the
/// certified net first.
std::vector<CoreQuery> cert_queries(const Side& side, const Correspondence& e, Direction which);

}  // namespace polyabs
