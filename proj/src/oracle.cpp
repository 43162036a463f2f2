#include "polyabs/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace polyabs {

namespace {

bool within(const Marking& m, Tokens max_tokens) {
  return std::all_of(m.values().begin(), m.values().end(), [&](Tokens v) { return v <= max_tokens; });
}

template <typename Accept>
ReachSet closure(const PetriNet& net, const Marking& m, const Bound& bound, Accept accept) {
  ReachSet out;
  std::deque<Marking> work{m};
  out.markings.insert(m);
  while (!work.empty()) {
    Marking cur = std::move(work.front());
    work.pop_front();
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      if (!accept(net.transition(t))) continue;
      auto next = fire(net, cur, t);
      if (!next) continue;
      if (!within(*next, bound.max_tokens)) {
        out.truncated = true;
        continue;
      }
      if (out.markings.insert(*next).second) work.push_back(std::move(*next));
    }
  }
  return out;
}

Tokens witness_bound(const PetriNet& from, const Bound& bound) {
  return bound.max_tokens * std::max<Tokens>(1, from.place_count());
}

std::vector<std::optional<std::string>> words_of_length_le_one(const Alphabet& alphabet) {
  std::vector<std::optional<std::string>> out{std::nullopt};
  for (const auto& s : alphabet.symbols()) out.emplace_back(s);
  return out;
}

bool satisfies(const PetriNet& net, const Formula& c, const Marking& m, Tokens qb) {
  Assignment a;
  for (std::size_t i = 0; i < net.place_count(); ++i) a[net.places()[i]] = m[i];
  return eval(c, a, qb);
}

std::string label_text(const std::optional<std::string>& s) { return s ? *s : "epsilon"; }

}  // namespace

ReachSet silent_reach(const PetriNet& net, const Marking& m, const Bound& bound) {
  return closure(net, m, bound, [](const Transition& t) { return t.label.is_silent(); });
}

ReachSet reach(const PetriNet& net, const Marking& m, const Bound& bound) {
  return closure(net, m, bound, [](const Transition&) { return true; });
}

ReachSet observable_step(const PetriNet& net, const Marking& m, const std::string& symbol, const Bound& bound) {
  ReachSet pre = silent_reach(net, m, bound);
  ReachSet out;
  out.truncated = pre.truncated;
  for (const auto& x : pre.markings)
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      const auto& tr = net.transition(t);
      if (tr.label.is_silent() || tr.label.symbol() != symbol) continue;
      auto y = fire(net, x, t);
      if (!y) continue;
      if (!within(*y, bound.max_tokens)) out.truncated = true;
      else out.markings.insert(*y);
    }
  return out;
}

ReachSet weak_step(const PetriNet& net, const Marking& m, const std::optional<std::string>& symbol,
                   const Bound& bound) {
  if (!symbol) return silent_reach(net, m, bound);
  ReachSet mid = observable_step(net, m, *symbol, bound);
  ReachSet out;
  out.truncated = mid.truncated;
  for (const auto& y : mid.markings) {
    auto r = silent_reach(net, y, bound);
    out.truncated = out.truncated || r.truncated;
    out.markings.insert(r.markings.begin(), r.markings.end());
  }
  return out;
}

std::vector<Marking> markings_satisfying(const PetriNet& net, const Formula& c, Tokens max_tokens) {
  std::vector<Marking> out;
  for (const auto& a : models_within_bound(c, net.places(), max_tokens)) {
    Marking m = net.zero_marking();
    for (std::size_t i = 0; i < net.place_count(); ++i) m[i] = a.at(net.places()[i]);
    out.push_back(std::move(m));
  }
  return out;
}

// MarkingRelation

MarkingRelation::MarkingRelation(const Formula& e, const PetriNet& first, const PetriNet& second)
    : e_tilde_(build_e_tilde(e, first.places(), second.places(), "n1", "n2")), first_(&first), second_(&second) {}

MarkingRelation MarkingRelation::reversed() const { return {e_tilde_, second_, first_, !swapped_}; }

Assignment MarkingRelation::assignment(const Marking& m1, const Marking& m2) const {
  const std::string a = swapped_ ? "n2." : "n1.", b = swapped_ ? "n1." : "n2.";
  Assignment out;
  for (std::size_t i = 0; i < first_->place_count(); ++i) out[a + first_->places()[i]] = m1[i];
  for (std::size_t i = 0; i < second_->place_count(); ++i) out[b + second_->places()[i]] = m2[i];
  return out;
}

bool MarkingRelation::holds(const Marking& m1, const Marking& m2, Tokens quantifier_bound) const {
  return eval(e_tilde_, assignment(m1, m2), quantifier_bound);
}

std::vector<Marking> MarkingRelation::related(const Marking& m1, Tokens max_tokens) const {
  const std::string a = swapped_ ? "n2." : "n1.", b = swapped_ ? "n1." : "n2.";
  std::map<std::string, LinearTerm> fixed;
  for (std::size_t i = 0; i < first_->place_count(); ++i)
    fixed[a + first_->places()[i]] = static_cast<std::int64_t>(m1[i]);
  Formula f = substitute(e_tilde_, fixed);
  std::vector<std::string> vars;
  for (const auto& p : second_->places()) vars.push_back(b + p);
  std::vector<Marking> out;
  for (const auto& model : models_within_bound(f, vars, max_tokens)) {
    Marking m = second_->zero_marking();
    for (std::size_t i = 0; i < vars.size(); ++i) m[i] = model.at(vars[i]);
    out.push_back(std::move(m));
  }
  return out;
}

// Checks

OracleResult check_coherency(const PetriNet& net, const Formula& c, const Bound& bound) {
  OracleResult res;
  for (const auto& m : markings_satisfying(net, c, bound.max_tokens)) {
    for (const auto& a : net.alphabet()) {
      ReachSet step = observable_step(net, m, a, bound);
      res.truncated = res.truncated || step.truncated;
      std::vector<const Marking*> coherent;
      for (const auto& y : step.markings)
        if (satisfies(net, c, y, bound.max_tokens)) coherent.push_back(&y);
      std::map<const Marking*, ReachSet> from_coherent;
      for (auto* y : coherent) {
        from_coherent[y] = silent_reach(net, *y, bound);
        res.truncated = res.truncated || from_coherent[y].truncated;
      }
      for (const auto& target : step.markings) {
        bool covered = std::any_of(coherent.begin(), coherent.end(),
                                   [&](const Marking* y) { return from_coherent[y].markings.count(target) > 0; });
        if (!covered && step.truncated) {
          // The missing witness may lie beyond the token bound.
          res.truncated = true;
          continue;
        }
        if (!covered) {
          res.counterexample = Counterexample{
              a,
              {net.format(m), net.format(target)},
              "firing '" + a + "' from " + net.format(m) + " reaches " + net.format(target) +
                  ", which no coherent marking reached by the same step leads to silently"};
          return res;
        }
      }
    }
  }
  return res;
}

namespace {

struct Oriented {
  const PetriNet* from;
  const PetriNet* to;
  const Formula* c_from;
  const Formula* c_to;
  MarkingRelation rel;
};

Oriented orient(const ReductionRule& rule, bool forward) {
  MarkingRelation rel(rule.e, rule.initial, rule.reduced);
  if (forward) return {&rule.initial, &rule.reduced, &rule.c1, &rule.c2, rel};
  return {&rule.reduced, &rule.initial, &rule.c2, &rule.c1, rel.reversed()};
}

}  // namespace

OracleResult check_s1(const ReductionRule& rule, bool forward, const Bound& bound) {
  auto o = orient(rule, forward);
  const Tokens wb = witness_bound(*o.from, bound);
  OracleResult res;
  for (const auto& m1 : markings_satisfying(*o.from, *o.c_from, bound.max_tokens)) {
    auto candidates = o.rel.related(m1, wb);
    bool found = std::any_of(candidates.begin(), candidates.end(),
                             [&](const Marking& m2) { return satisfies(*o.to, *o.c_to, m2, wb); });
    if (!found) {
      res.counterexample = Counterexample{
          std::nullopt, {o.from->format(m1)}, o.from->format(m1) + " has no compatible marking satisfying the other constraint"};
      return res;
    }
  }
  return res;
}

OracleResult check_s2(const ReductionRule& rule, bool forward, const Bound& bound) {
  auto o = orient(rule, forward);
  const Tokens wb = witness_bound(*o.from, bound);
  OracleResult res;
  if (!o.from->has_silent_transitions()) return res;
  auto all = markings_satisfying(*o.from, Formula::top(), bound.max_tokens);
  for (const auto& m1 : all) {
    auto images = o.rel.related(m1, wb);
    if (images.empty()) continue;
    for (TransitionId t = 0; t < o.from->transition_count(); ++t) {
      if (!o.from->transition(t).label.is_silent()) continue;
      auto next = fire(*o.from, m1, t);
      if (!next) continue;
      for (const auto& m2 : images) {
        if (!o.rel.holds(*next, m2, wb)) {
          res.counterexample = Counterexample{
              std::nullopt,
              {o.from->format(m1), o.to->format(m2), o.from->format(*next)},
              "silent step " + o.from->transition(t).name + " from " + o.from->format(m1) + " to " +
                  o.from->format(*next) + " breaks compatibility with " + o.to->format(m2)};
          return res;
        }
      }
    }
  }
  return res;
}

OracleResult check_s3(const ReductionRule& rule, bool forward, const Bound& bound) {
  auto o = orient(rule, forward);
  const Tokens wb = witness_bound(*o.from, bound);
  const Bound to_bound{wb, bound.max_depth};
  OracleResult res;
  for (const auto& m1 : markings_satisfying(*o.from, *o.c_from, bound.max_tokens)) {
    for (const auto& m2 : o.rel.related(m1, wb)) {
      if (!satisfies(*o.to, *o.c_to, m2, wb)) continue;
      for (const auto& sigma : words_of_length_le_one(rule.alphabet)) {
        ReachSet s1 = weak_step(*o.from, m1, sigma, bound);
        ReachSet s2 = weak_step(*o.to, m2, sigma, to_bound);
        res.truncated = res.truncated || s1.truncated || s2.truncated;
        for (const auto& m1p : s1.markings)
          for (const auto& m2p : o.rel.related(m1p, wb)) {
            if (s2.markings.count(m2p)) continue;
            if (s2.truncated) {
              res.truncated = true;
              continue;
            }
            res.counterexample = Counterexample{
                sigma,
                {o.from->format(m1), o.to->format(m2), o.from->format(m1p), o.to->format(m2p)},
                o.from->format(m1) + " reaches " + o.from->format(m1p) + " by '" + label_text(sigma) + "' but " +
                    o.to->format(m2) + " cannot reach the compatible " + o.to->format(m2p)};
            return res;
          }
      }
    }
  }
  return res;
}

OracleResult check_instantiation(const ReductionRule& rule, const Marking& m1, const Marking& m2, const Bound& bound) {
  MarkingRelation rel(rule.e, rule.initial, rule.reduced);
  const Tokens wb = witness_bound(rule.initial, bound);
  const Bound n2_bound{std::max(wb, bound.max_tokens), bound.max_depth};
  OracleResult res;
  if (!rel.holds(m1, m2, wb)) {
    res.counterexample = Counterexample{std::nullopt,
                                        {rule.initial.format(m1), rule.reduced.format(m2)},
                                        "initial markings are not compatible"};
    return res;
  }

  struct State {
    std::set<Marking> s1, s2;
    bool s2_truncated;
    std::vector<std::string> word;
  };
  auto expand = [](const PetriNet& net, const std::set<Marking>& from, const std::optional<std::string>& a,
                   const Bound& b, bool& truncated) {
    std::set<Marking> out;
    for (const auto& m : from) {
      auto r = weak_step(net, m, a, b);
      truncated = truncated || r.truncated;
      out.insert(r.markings.begin(), r.markings.end());
    }
    return out;
  };

  bool t1 = false, t2 = false;
  std::deque<State> work;
  work.push_back({expand(rule.initial, {m1}, std::nullopt, bound, t1), expand(rule.reduced, {m2}, std::nullopt, n2_bound, t2),
                  t2, {}});
  res.truncated = t1;
  std::set<std::pair<std::set<Marking>, std::set<Marking>>> seen;
  while (!work.empty()) {
    State st = std::move(work.front());
    work.pop_front();
    if (!seen.insert({st.s1, st.s2}).second) continue;

    std::string word;
    for (const auto& w : st.word) word += (word.empty() ? "" : " ") + w;
    std::optional<std::string> last = st.word.empty() ? std::nullopt : std::optional<std::string>(st.word.back());
    for (const auto& m1p : st.s1) {
      auto images = rel.related(m1p, wb);
      if (images.empty()) {
        res.counterexample = Counterexample{last, {rule.initial.format(m1p)},
                                            "after '" + word + "' " + rule.initial.format(m1p) + " has no compatible marking"};
        return res;
      }
      for (const auto& m2p : images) {
        if (st.s2.count(m2p)) continue;
        if (st.s2_truncated) {
          res.truncated = true;
          continue;
        }
        res.counterexample = Counterexample{
            last,
            {rule.initial.format(m1p), rule.reduced.format(m2p)},
            "after '" + word + "' the first net reaches " + rule.initial.format(m1p) +
                " but the second cannot reach the compatible " + rule.reduced.format(m2p)};
        return res;
      }
    }
    if (st.word.size() >= bound.max_depth) continue;
    for (const auto& a : rule.alphabet.symbols()) {
      bool tr1 = false, tr2 = st.s2_truncated;
      auto n1 = expand(rule.initial, st.s1, a, bound, tr1);
      if (n1.empty()) continue;
      auto n2 = expand(rule.reduced, st.s2, a, n2_bound, tr2);
      res.truncated = res.truncated || tr1;
      auto word_next = st.word;
      word_next.push_back(a);
      work.push_back({std::move(n1), std::move(n2), tr2, std::move(word_next)});
    }
  }
  return res;
}

bool OracleReport::any_counterexample() const {
  for (int i = 0; i < 2; ++i)
    if (!coherency[i].ok() || !s1[i].ok() || !s2[i].ok() || !s3[i].ok()) return true;
  return false;
}

OracleReport run_oracle(const ReductionRule& rule, const Bound& bound) {
  OracleReport r;
  r.coherency[0] = check_coherency(rule.initial, rule.c1, bound);
  r.coherency[1] = check_coherency(rule.reduced, rule.c2, bound);
  for (int i = 0; i < 2; ++i) {
    r.s1[i] = check_s1(rule, i == 0, bound);
    r.s2[i] = check_s2(rule, i == 0, bound);
    r.s3[i] = check_s3(rule, i == 0, bound);
  }
  return r;
}

}  // namespace polyabs
