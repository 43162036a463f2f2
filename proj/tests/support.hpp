#pragma once

// Shared fixtures and reference implementations for the test suites. The
// helpers here deliberately avoid the library's own semantics so that they
// can serve as independent oracles.

#include "polyabs/petri_net.hpp"
#include "polyabs/rule.hpp"
#include "polyabs/smt.hpp"

#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace testing {

using namespace polyabs;

inline SolverConfig solver(unsigned timeout_ms = 30000) {
  SolverConfig c;
  c.command = POLYABS_SOLVER_CMD;
  c.timeout_ms = timeout_ms;
  return c;
}

inline std::string rule_path(const std::string& name) { return std::string(POLYABS_RULES_DIR) + "/" + name; }
inline ReductionRule fixture(const std::string& name) { return load_rule(rule_path(name)); }

inline PetriNet concat_n1() {
  PetriNet n;
  n.add_place("y1");
  n.add_place("y2");
  n.add_transition("a", Label::observable("a"), {}, {{"y1", 1}});
  n.add_transition("tau", Label::silent(), {{"y1", 1}}, {{"y2", 1}});
  n.add_transition("b", Label::observable("b"), {{"y2", 1}}, {});
  return n;
}

inline PetriNet concat_n2() {
  PetriNet n;
  n.add_place("x");
  n.add_transition("a", Label::observable("a"), {}, {{"x", 1}});
  n.add_transition("b", Label::observable("b"), {{"x", 1}}, {});
  return n;
}

inline PetriNet fake_concat_n1() {
  PetriNet n = concat_n1();
  n.add_transition("d", Label::observable("d"), {}, {{"y2", 1}});
  return n;
}

using Vec = std::vector<std::int64_t>;

/// Step-by-step firing on raw vectors.
inline std::optional<Vec> naive_fire(const PetriNet& net, Vec m, const FiringSequence& seq) {
  for (auto t : seq) {
    const auto& tr = net.transitions()[t];
    for (std::size_t p = 0; p < m.size(); ++p) {
      m[p] -= static_cast<std::int64_t>(tr.pre[p]);
      if (m[p] < 0) return std::nullopt;
      m[p] += static_cast<std::int64_t>(tr.post[p]);
    }
  }
  return m;
}

/// All vectors of length n with components in 0..bound.
inline std::vector<Vec> all_vectors(std::size_t n, std::int64_t bound) {
  std::vector<Vec> out{Vec(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Vec> next;
    for (const auto& v : out)
      for (std::int64_t k = 0; k <= bound; ++k) {
        Vec w = v;
        w[i] = k;
        next.push_back(w);
      }
    out = std::move(next);
  }
  return out;
}

inline Vec to_vec(const Marking& m) { return Vec(m.values().begin(), m.values().end()); }
inline Marking to_marking(const Vec& v) { return Marking(std::vector<Tokens>(v.begin(), v.end())); }

inline bool within(const Vec& v, std::int64_t bound) {
  for (auto x : v)
    if (x > bound) return false;
  return true;
}

/// Silent closure by BFS, dropping markings beyond the bound.
inline std::set<Vec> bfs_silent(const PetriNet& net, const Vec& m, std::int64_t bound) {
  std::set<Vec> seen{m};
  std::deque<Vec> todo{m};
  while (!todo.empty()) {
    Vec cur = todo.front();
    todo.pop_front();
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      if (!net.transitions()[t].label.is_silent()) continue;
      auto next = naive_fire(net, cur, {t});
      if (next && within(*next, bound) && seen.insert(*next).second) todo.push_back(*next);
    }
  }
  return seen;
}

/// Markings reached by silent steps followed by one transition labeled `symbol`.
inline std::set<Vec> bfs_left_step(const PetriNet& net, const Vec& m, const std::string& symbol, std::int64_t bound) {
  std::set<Vec> out;
  for (const auto& mid : bfs_silent(net, m, bound))
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      const auto& l = net.transitions()[t].label;
      if (l.is_silent() || l.symbol() != symbol) continue;
      auto next = naive_fire(net, mid, {t});
      if (next && within(*next, bound)) out.insert(*next);
    }
  return out;
}

/// Assignment for a marking in namespace ns.
inline Assignment assign(const PetriNet& net, const std::string& ns, const Vec& m, Assignment a = {}) {
  for (std::size_t p = 0; p < net.place_count(); ++p) a[ns + "." + net.places()[p]] = static_cast<std::uint64_t>(m[p]);
  return a;
}

}  // namespace testing
