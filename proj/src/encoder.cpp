#include "polyabs/encoder.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace polyabs {

std::string place_var(std::string_view ns, std::string_view place) {
  std::string v(ns);
  v += '.';
  v += place;
  return v;
}

std::string primed(std::string_view ns, int n) { return std::string(ns) + std::string(static_cast<std::size_t>(n), '\''); }

std::vector<std::string> vector_vars(const PetriNet& net, std::string_view ns) {
  std::vector<std::string> out;
  out.reserve(net.place_count());
  for (const auto& p : net.places()) out.push_back(place_var(ns, p));
  return out;
}

Formula at(const Formula& predicate, const PetriNet& net, std::string_view ns) {
  std::map<std::string, std::string> m;
  for (const auto& p : net.places()) m[p] = place_var(ns, p);
  return rename_free(predicate, m);
}

Formula move_namespace(const Formula& f, const PetriNet& net, std::string_view from, std::string_view to) {
  if (from == to) return f;
  std::map<std::string, std::string> m;
  for (const auto& p : net.places()) m[place_var(from, p)] = place_var(to, p);
  return rename_free(f, m);
}

Formula vectors_equal(const PetriNet& net, std::string_view a, std::string_view b) {
  std::vector<Formula> parts;
  for (const auto& p : net.places()) parts.push_back(eq(LinearTerm::var(place_var(b, p)), LinearTerm::var(place_var(a, p))));
  return Formula::conj(std::move(parts));
}

namespace {

// Instantiates a src/dst template for `net`, optionally renaming the label.
Formula instantiate(const Formula& tmpl, const PetriNet& net, std::string_view src, std::string_view dst,
                    std::string_view label = kLabelVar) {
  std::map<std::string, std::string> m;
  for (const auto& p : net.places()) {
    if (src != kSrc) m[place_var(kSrc, p)] = place_var(src, p);
    if (dst != kDst) m[place_var(kDst, p)] = place_var(dst, p);
  }
  if (label != kLabelVar) m[std::string(kLabelVar)] = std::string(label);
  return m.empty() ? tmpl : rename_free(tmpl, m);
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Formula label_range(std::string_view label, std::int64_t lo, std::int64_t hi) {
  auto l = LinearTerm::var(std::string(label));
  return Formula::conj({ge(l, lo), le(l, hi)});
}

}  // namespace

// Alphabet

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  std::sort(symbols_.begin(), symbols_.end());
  symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
}

Alphabet Alphabet::of(const PetriNet& a, const PetriNet& b) {
  auto s = a.alphabet();
  auto t = b.alphabet();
  s.insert(s.end(), t.begin(), t.end());
  return Alphabet(std::move(s));
}

std::int64_t Alphabet::code(const Label& label) const { return label.is_silent() ? 0 : code(label.symbol()); }

std::int64_t Alphabet::code(std::string_view symbol) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end() || *it != symbol) throw std::out_of_range("symbol '" + std::string(symbol) + "' not in alphabet");
  return static_cast<std::int64_t>(it - symbols_.begin()) + 1;
}

std::string Alphabet::symbol(std::int64_t code) const {
  if (code == 0) return "tau";
  if (code < 0 || static_cast<std::size_t>(code) > symbols_.size()) throw std::out_of_range("label code out of range");
  return symbols_[static_cast<std::size_t>(code - 1)];
}

std::string to_string(TauStarSource s) {
  switch (s) {
    case TauStarSource::Searched: return "searched";
    case TauStarSource::Imported: return "imported";
    case TauStarSource::Derived: return "derived";
  }
  return "?";
}

Formula TauStarPredicate::apply(const PetriNet& net, std::string_view from, std::string_view to) const {
  return instantiate(formula, net, from, to);
}

// Correspondence

Correspondence Correspondence::build(const Formula& e, const PetriNet& first, const PetriNet& second) {
  Correspondence c;
  c.first = &first;
  c.second = &second;
  c.e_tilde = build_e_tilde(e, first.places(), second.places(), c.first_ns, c.second_ns);
  return c;
}

Formula Correspondence::apply(std::string_view first_vec, std::string_view second_vec) const {
  std::map<std::string, std::string> m;
  if (first_vec != first_ns)
    for (const auto& p : first->places()) m[place_var(first_ns, p)] = place_var(first_vec, p);
  if (second_vec != second_ns)
    for (const auto& p : second->places()) m[place_var(second_ns, p)] = place_var(second_vec, p);
  return m.empty() ? e_tilde : rename_free(e_tilde, m);
}

Correspondence Correspondence::reversed() const {
  Correspondence c = *this;
  std::swap(c.first, c.second);
  std::swap(c.first_ns, c.second_ns);
  return c;
}

// Transition relation

Formula enbl(const PetriNet& net, TransitionId t, std::string_view ns) {
  const auto& tr = net.transition(t);
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < net.place_count(); ++i)
    parts.push_back(ge(LinearTerm::var(place_var(ns, net.places()[i])), static_cast<std::int64_t>(tr.pre[i])));
  return Formula::conj(std::move(parts));
}

Formula delta(const PetriNet& net, TransitionId t, std::string_view src, std::string_view dst) {
  const auto& tr = net.transition(t);
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < net.place_count(); ++i) {
    const auto& p = net.places()[i];
    auto d = static_cast<std::int64_t>(tr.post[i]) - static_cast<std::int64_t>(tr.pre[i]);
    parts.push_back(eq(LinearTerm::var(place_var(dst, p)), LinearTerm::var(place_var(src, p)) + d));
  }
  return Formula::conj(std::move(parts));
}

Formula trans_pred(const PetriNet& net, const Alphabet& alphabet, std::string_view src, std::string_view dst,
                   std::string_view label) {
  std::vector<Formula> parts;
  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    const auto& tr = net.transition(t);
    if (tr.label.is_silent()) continue;
    parts.push_back(Formula::conj(
        {enbl(net, t, src), delta(net, t, src, dst), eq(LinearTerm::var(std::string(label)), alphabet.code(tr.label))}));
  }
  return Formula::disj(std::move(parts));
}

Formula tau_step(const PetriNet& net, std::string_view src, std::string_view dst) {
  std::vector<Formula> parts;
  for (TransitionId t = 0; t < net.transition_count(); ++t)
    if (net.transition(t).label.is_silent()) parts.push_back(Formula::conj({enbl(net, t, src), delta(net, t, src, dst)}));
  return Formula::disj(std::move(parts));
}

// Silent reachability

TauStarPredicate tau_star_from_certificate(const PetriNet& net, const std::vector<FiringSequence>& sequences,
                                           TauStarSource source) {
  for (const auto& seq : sequences)
    for (auto t : seq)
      if (!net.transition(t).label.is_silent()) throw NonSilentTransitionInCertificate(net.transition(t).name);

  const std::size_t n = sequences.size();
  if (n == 0) return {vectors_equal(net, kSrc, kDst), source};

  auto stage = [&](std::size_t i) -> std::string {
    if (i == 0) return std::string(kSrc);
    if (i == n) return std::string(kDst);
    return "acc" + std::to_string(i);
  };

  std::vector<std::string> bound;
  std::vector<Formula> steps;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string k = "k" + std::to_string(i + 1);
    bound.push_back(k);
    if (i + 1 < n) bound = concat(std::move(bound), vector_vars(net, stage(i + 1)));

    const auto hd = hurdle_delta(net, sequences[i]);
    const auto from = stage(i), to = stage(i + 1);
    const auto kv = LinearTerm::var(k);

    std::vector<Formula> fired{ge(kv, 1)};
    for (std::size_t p = 0; p < net.place_count(); ++p) {
      const auto& place = net.places()[p];
      const std::int64_t h = hd.hurdle[p], d = hd.delta[p], neg = d < 0 ? -d : 0;
      auto x = LinearTerm::var(place_var(from, place));
      // H(s^k) = H + (k-1) * neg for k >= 1
      if (h != 0 || neg != 0) fired.push_back(ge(x, LinearTerm(h - neg) + kv.scaled(neg)));
      fired.push_back(eq(LinearTerm::var(place_var(to, place)), x + kv.scaled(d)));
    }
    Formula idle = Formula::conj({eq(kv, 0), vectors_equal(net, from, to)});
    steps.push_back(Formula::disj({std::move(idle), Formula::conj(std::move(fired))}));
  }
  return {Formula::exists(std::move(bound), Formula::conj(std::move(steps))), source};
}

TauStarPredicate tau_star_derived(const Correspondence& e) {
  const std::string q = "tq";
  Formula body = Formula::conj({e.apply(kSrc, q), e.apply(kDst, q)});
  return {Formula::exists(vector_vars(*e.second, q), std::move(body)), TauStarSource::Derived};
}

Formula tleft(const PetriNet& net, const Alphabet& alphabet, const TauStarPredicate& tau, std::string_view src,
              std::string_view dst, std::string_view label) {
  const std::string mid = "tl";
  Formula tmpl = Formula::exists(vector_vars(net, mid),
                                 Formula::conj({tau.apply(net, kSrc, mid), trans_pred(net, alphabet, mid, kDst)}));
  return instantiate(tmpl, net, src, dst, label);
}

Formula that(const PetriNet& net, const Alphabet& alphabet, const Formula& c, const TauStarPredicate& tau,
             std::string_view src, std::string_view dst, std::string_view label) {
  const std::string mid = "th";
  Formula step = Formula::exists(
      vector_vars(net, mid),
      Formula::conj({tleft(net, alphabet, tau, kSrc, mid), at(c, net, mid), tau.apply(net, mid, kDst)}));
  Formula silent = Formula::conj({eq(LinearTerm::var(std::string(kLabelVar)), 0), tau.apply(net, kSrc, kDst)});
  return instantiate(Formula::disj({std::move(step), std::move(silent)}), net, src, dst, label);
}

Formula cec_pred(const Formula& c1, const Correspondence& e, const Formula& c2, std::string_view first_vec,
                 std::string_view second_vec) {
  return Formula::conj({at(c1, *e.first, first_vec), e.apply(first_vec, second_vec), at(c2, *e.second, second_vec)});
}

// Queries

std::string to_string(QueryKind k) {
  switch (k) {
    case QueryKind::Core0: return "Core0";
    case QueryKind::Core1: return "Core1";
    case QueryKind::Core2: return "Core2";
    case QueryKind::Core3: return "Core3";
    case QueryKind::CertReflexive: return "Reflexive";
    case QueryKind::CertClosure: return "Closure";
    case QueryKind::CertFastEq: return "FastEq";
  }
  return "?";
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::N1: return "N1";
    case Direction::N2: return "N2";
    case Direction::N1ToN2: return "N1->N2";
    case Direction::N2ToN1: return "N2->N1";
  }
  return "?";
}

std::string CoreQuery::name() const { return to_string(kind) + " " + to_string(direction); }

CoreQuery core0(const Side& side, const Alphabet& alphabet, Direction which) {
  const auto& net = *side.net;
  const auto p = primed(side.ns, 0), p1 = primed(side.ns, 1), r = primed(side.ns, 2);
  Formula premise = Formula::conj({label_range(kLabelVar, 1, static_cast<std::int64_t>(alphabet.size())),
                                   at(side.constraint, net, p), tleft(net, alphabet, side.tau, p, p1)});
  Formula conclusion = Formula::exists(
      vector_vars(net, r),
      Formula::conj({at(side.constraint, net, r), tleft(net, alphabet, side.tau, p, r), side.tau.apply(net, r, p1)}));
  auto vars = concat(vector_vars(net, p), vector_vars(net, p1));
  vars.emplace_back(kLabelVar);
  return {QueryKind::Core0, which, Formula::forall(std::move(vars), Formula::implies(premise, conclusion))};
}

CoreQuery core1(const Side& from, const Correspondence& e, const Side& to, Direction d) {
  Formula witness = Formula::exists(
      vector_vars(*to.net, to.ns), Formula::conj({e.apply(from.ns, to.ns), at(to.constraint, *to.net, to.ns)}));
  return {QueryKind::Core1, d,
          Formula::forall(vector_vars(*from.net, from.ns),
                          Formula::implies(at(from.constraint, *from.net, from.ns), witness))};
}

CoreQuery core2(const Side& from, const Correspondence& e, const Side& to, Direction d) {
  const auto p1 = primed(from.ns, 0), p1s = primed(from.ns, 1), p2 = primed(to.ns, 0);
  Formula body = Formula::implies(Formula::conj({e.apply(p1, p2), tau_step(*from.net, p1, p1s)}), e.apply(p1s, p2));
  auto vars = concat(concat(vector_vars(*from.net, p1), vector_vars(*to.net, p2)), vector_vars(*from.net, p1s));
  return {QueryKind::Core2, d, Formula::forall(std::move(vars), std::move(body))};
}

CoreQuery core3(const Side& from, const Correspondence& e, const Side& to, const Alphabet& alphabet, Direction d) {
  const auto p1 = primed(from.ns, 0), p1s = primed(from.ns, 1), p2 = primed(to.ns, 0), p2s = primed(to.ns, 1);
  Formula premise = Formula::conj({label_range(kLabelVar, 0, static_cast<std::int64_t>(alphabet.size())),
                                   cec_pred(from.constraint, e, to.constraint, p1, p2),
                                   that(*from.net, alphabet, from.constraint, from.tau, p1, p1s), e.apply(p1s, p2s)});
  Formula conclusion = that(*to.net, alphabet, to.constraint, to.tau, p2, p2s);
  auto vars = concat(vector_vars(*from.net, p1), vector_vars(*to.net, p2));
  vars.emplace_back(kLabelVar);
  vars = concat(concat(std::move(vars), vector_vars(*from.net, p1s)), vector_vars(*to.net, p2s));
  return {QueryKind::Core3, d, Formula::forall(std::move(vars), Formula::implies(premise, conclusion))};
}

CoreQuery reflexive_query(const Side& side, Direction which) {
  const auto& net = *side.net;
  const auto p = primed(side.ns, 0);
  return {QueryKind::CertReflexive, which,
          Formula::forall(vector_vars(net, p), Formula::implies(at(side.constraint, net, p), side.tau.apply(net, p, p)))};
}

CoreQuery closure_query(const Side& side, Direction which) {
  const auto& net = *side.net;
  const auto p = primed(side.ns, 0), p1 = primed(side.ns, 1), p2 = primed(side.ns, 2);
  Formula body = Formula::implies(
      Formula::conj({at(side.constraint, net, p), side.tau.apply(net, p, p1), tau_step(net, p1, p2)}),
      side.tau.apply(net, p, p2));
  return {QueryKind::CertClosure, which,
          Formula::forall(concat(concat(vector_vars(net, p), vector_vars(net, p1)), vector_vars(net, p2)),
                          std::move(body))};
}

CoreQuery fast_eq_query(const Side& side, const Correspondence& e, Direction which) {
  const auto& net = *side.net;
  const auto p = primed(side.ns, 0), p1 = primed(side.ns, 1);
  const std::string q = "q";
  Formula same_image = Formula::exists(vector_vars(*e.second, q), Formula::conj({e.apply(p, q), e.apply(p1, q)}));
  Formula body = Formula::implies(at(side.constraint, net, p),
                                  Formula::iff(std::move(same_image), side.tau.apply(net, p, p1)));
  return {QueryKind::CertFastEq, which,
          Formula::forall(concat(vector_vars(net, p), vector_vars(net, p1)), std::move(body))};
}

std::vector<CoreQuery> cert_queries(const Side& side, const Correspondence& e, Direction which) {
  return {reflexive_query(side, which), closure_query(side, which), fast_eq_query(side, e, which)};
}

}  // namespace polyabs
