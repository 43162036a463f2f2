#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <random>

using namespace polyabs;
using namespace testing;

namespace {

IntVector iv(std::vector<std::int64_t> v) { return IntVector(std::move(v)); }

// Inductive hurdle/delta over an arbitrary split point, used to check that the
// result does not depend on how a sequence is cut.
HurdleDelta split_hd(const PetriNet& net, const FiringSequence& seq, std::size_t cut) {
  FiringSequence left(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(cut));
  FiringSequence right(seq.begin() + static_cast<std::ptrdiff_t>(cut), seq.end());
  return compose(hurdle_delta(net, left), hurdle_delta(net, right));
}

PetriNet random_net(std::mt19937& rng, std::size_t places, std::size_t transitions) {
  PetriNet n;
  for (std::size_t p = 0; p < places; ++p) n.add_place("p" + std::to_string(p));
  std::uniform_int_distribution<int> w(0, 2);
  for (std::size_t t = 0; t < transitions; ++t) {
    std::map<std::string, Tokens> pre, post;
    for (std::size_t p = 0; p < places; ++p) {
      pre[n.places()[p]] = static_cast<Tokens>(w(rng));
      post[n.places()[p]] = static_cast<Tokens>(w(rng));
    }
    n.add_transition("t" + std::to_string(t), t % 2 ? Label::silent() : Label::observable("a"), pre, post);
  }
  return n;
}

// The hurdle/delta contract for one case, checked against step-by-step firing.
bool contract_holds(const PetriNet& net, const FiringSequence& seq, const Vec& m) {
  auto hd = hurdle_delta(net, seq);
  bool covers = true;
  for (std::size_t p = 0; p < m.size(); ++p) covers = covers && m[p] >= hd.hurdle[p];
  auto naive = naive_fire(net, m, seq);
  auto lib = fire_sequence(net, to_marking(m), seq);
  if (naive.has_value() != covers || lib.has_value() != covers) return false;
  if (!covers) return true;
  for (std::size_t p = 0; p < m.size(); ++p)
    if ((*naive)[p] != m[p] + hd.delta[p] || static_cast<std::int64_t>((*lib)[p]) != (*naive)[p]) return false;
  return true;
}

}  // namespace

TEST_CASE("fire follows the firing rule") {
  auto n = concat_n1();
  auto tau = n.transition_index("tau");
  CHECK(fire(n, n.marking({{"y1", 2}}), tau) == n.marking({{"y1", 1}, {"y2", 1}}));
  CHECK_FALSE(fire(n, n.zero_marking(), tau).has_value());
  CHECK(fire(n, n.marking({{"y1", 1}, {"y2", 3}}), n.transition_index("b")) == n.marking({{"y1", 1}, {"y2", 2}}));
}

TEST_CASE("fire_sequence folds fire") {
  auto n = concat_n1();
  auto tau = n.transition_index("tau");
  auto m = n.marking({{"y1", 3}, {"y2", 1}});
  CHECK(fire_sequence(n, m, {}) == m);
  CHECK(fire_sequence(n, n.marking({{"y1", 2}}), {tau, tau}) == n.marking({{"y2", 2}}));
  CHECK_FALSE(fire_sequence(n, n.marking({{"y1", 1}}), {tau, tau}).has_value());
}

TEST_CASE("hurdle and delta of basic sequences") {
  auto n = concat_n1();
  auto tau = n.transition_index("tau");
  auto eps = hurdle_delta(n, {});
  CHECK(eps.hurdle == iv({0, 0}));
  CHECK(eps.delta == iv({0, 0}));
  for (TransitionId t = 0; t < n.transition_count(); ++t) {
    auto hd = hurdle_delta(n, {t});
    const auto& tr = n.transition(t);
    for (std::size_t p = 0; p < 2; ++p) {
      CHECK(hd.hurdle[p] == static_cast<std::int64_t>(tr.pre[p]));
      CHECK(hd.delta[p] == static_cast<std::int64_t>(tr.post[p]) - static_cast<std::int64_t>(tr.pre[p]));
    }
  }
  auto tt = hurdle_delta(n, {tau, tau});
  CHECK(tt.hurdle == iv({2, 0}));
  CHECK(tt.delta == iv({-2, 2}));
  for (const auto& m : all_vectors(2, 4)) CHECK(contract_holds(n, {tau, tau}, m));
}

TEST_CASE("hurdle/delta contract on random nets") {
  std::mt19937 rng(20221014);
  std::size_t cases = 0;
  for (int round = 0; round < 1500; ++round) {
    std::size_t places = 1 + rng() % 5;
    auto net = random_net(rng, places, 1 + rng() % 4);
    FiringSequence seq(rng() % 7);
    for (auto& t : seq) t = rng() % net.transition_count();
    Vec m(places);
    for (auto& x : m) x = static_cast<std::int64_t>(rng() % 6);
    ++cases;
    REQUIRE(contract_holds(net, seq, m));
    for (std::size_t cut = 0; cut <= seq.size(); ++cut) {
      auto s = split_hd(net, seq, cut);
      auto whole = hurdle_delta(net, seq);
      REQUIRE(s.hurdle == whole.hurdle);
      REQUIRE(s.delta == whole.delta);
    }
  }
  CHECK(cases >= 1000);
}

TEST_CASE("hurdle/delta contract on every two-place net with two transitions") {
  // Pre and post weights range over 0..1; sequences up to length 4.
  std::vector<std::pair<std::vector<Tokens>, std::vector<Tokens>>> shapes;
  for (int code = 0; code < 16; ++code)
    shapes.push_back({{Tokens(code & 1), Tokens((code >> 1) & 1)}, {Tokens((code >> 2) & 1), Tokens((code >> 3) & 1)}});
  std::vector<FiringSequence> seqs{{}};
  for (std::size_t len = 1; len <= 4; ++len) {
    std::vector<FiringSequence> next;
    for (const auto& s : seqs)
      if (s.size() == len - 1)
        for (TransitionId t : {0u, 1u}) {
          auto w = s;
          w.push_back(t);
          next.push_back(w);
        }
    seqs.insert(seqs.end(), next.begin(), next.end());
  }
  auto markings = all_vectors(2, 5);
  std::size_t failures = 0;
  for (const auto& s0 : shapes)
    for (const auto& s1 : shapes) {
      PetriNet n;
      n.add_place("p");
      n.add_place("q");
      n.add_transition("t0", Label::silent(), {{"p", s0.first[0]}, {"q", s0.first[1]}},
                       {{"p", s0.second[0]}, {"q", s0.second[1]}});
      n.add_transition("t1", Label::silent(), {{"p", s1.first[0]}, {"q", s1.first[1]}},
                       {{"p", s1.second[0]}, {"q", s1.second[1]}});
      for (const auto& seq : seqs)
        for (const auto& m : markings)
          if (!contract_holds(n, seq, m)) ++failures;
    }
  CHECK(failures == 0);
}

TEST_CASE("accelerated hurdle/delta equals the k-fold concatenation") {
  std::vector<std::pair<PetriNet, std::vector<FiringSequence>>> cases;
  auto c = concat_n1();
  auto tau = c.transition_index("tau");
  cases.push_back({c, {{tau}, {tau, tau}}});
  auto pool = fixture("swimming_pool").initial;
  std::vector<FiringSequence> pool_seqs;
  for (TransitionId t = 0; t < pool.transition_count(); ++t) pool_seqs.push_back({t});
  FiringSequence lap;
  for (TransitionId t = 0; t < pool.transition_count(); ++t) lap.push_back(t);
  pool_seqs.push_back(lap);
  pool_seqs.push_back({pool.transition_index("take_cabin"), pool.transition_index("take_bag")});
  cases.push_back({pool, pool_seqs});
  for (const auto& [net, seqs] : cases)
    for (const auto& s : seqs) {
      auto once = hurdle_delta(net, s);
      FiringSequence repeated;
      for (std::uint64_t k = 0; k <= 8; ++k) {
        auto inductive = hurdle_delta(net, repeated);
        auto closed = accelerate(once, k);
        CHECK(closed.hurdle == inductive.hurdle);
        CHECK(closed.delta == inductive.delta);
        repeated.insert(repeated.end(), s.begin(), s.end());
      }
    }
}

TEST_CASE("k = 0 acceleration is neutral") {
  auto c = concat_n1();
  auto z = accelerate(hurdle_delta(c, {c.transition_index("tau")}), 0);
  CHECK(z.hurdle == iv({0, 0}));
  CHECK(z.delta == iv({0, 0}));
}

TEST_CASE("positive part") {
  CHECK(positive_part(iv({-2, 3})) == iv({0, 3}));
  CHECK(positive_part(iv({0, 0})) == iv({0, 0}));
  CHECK(positive_part(iv({5, -5})) == iv({5, 0}));
}

TEST_CASE("transition removal") {
  auto removed = t_minus(fake_concat_n1(), "d");
  CHECK(removed.symbol_found);
  CHECK(structurally_equal(removed.net, concat_n1()));

  auto untouched = t_minus(concat_n2(), "z");
  CHECK_FALSE(untouched.symbol_found);
  CHECK(structurally_equal(untouched.net, concat_n2()));

  auto only_a = t_minus(concat_n2(), "b").net;
  REQUIRE(only_a.transition_count() == 1);
  CHECK(only_a.transitions()[0].label == Label::observable("a"));
}

TEST_CASE("transition duplication") {
  auto dup = t_plus(concat_n2(), "b", "b'");
  REQUIRE(dup.transition_count() == 3);
  const auto& copy = dup.transitions()[2];
  CHECK(copy.label == Label::observable("b'"));
  CHECK(copy.pre == std::vector<Tokens>{1});

  auto same = t_plus(concat_n2(), "a", "a");
  std::size_t labeled_a = 0;
  for (const auto& t : same.transitions()) labeled_a += t.label == Label::observable("a");
  CHECK(labeled_a == 2);

  auto round_trip = t_minus(t_minus(t_plus(fake_concat_n1(), "d", "d'"), "d").net, "d'").net;
  CHECK(structurally_equal(round_trip, concat_n1()));
}

TEST_CASE("transition operations keep the silent sub-net") {
  auto silent_of = [](const PetriNet& n) {
    std::multiset<std::pair<std::vector<Tokens>, std::vector<Tokens>>> s;
    for (const auto& t : n.transitions())
      if (t.label.is_silent()) s.insert({t.pre, t.post});
    return s;
  };
  auto base = fake_concat_n1();
  CHECK(silent_of(t_minus(base, "d").net) == silent_of(base));
  CHECK(silent_of(t_minus(base, "a").net) == silent_of(base));
  CHECK(silent_of(t_plus(base, "b", "c")) == silent_of(base));
}

TEST_CASE("relabel and product") {
  auto r = relabel(concat_n2(), "b", Label::silent());
  CHECK(r.transitions()[1].label.is_silent());
  CHECK(r.transitions()[0].label == Label::observable("a"));

  PetriNet single;
  single.add_place("p");
  single.add_transition("t", Label::observable("a"), {{"p", 1}}, {});
  auto prod = sync_product(single, rename_places(single, {{"p", "q"}}));
  REQUIRE(prod.transition_count() == 1);
  CHECK(prod.transitions()[0].pre == std::vector<Tokens>{1, 1});

  PetriNet other;
  other.add_place("z");
  other.add_transition("u", Label::observable("c"), {}, {{"z", 1}});
  other.add_transition("v", Label::silent(), {{"z", 1}}, {});
  auto inter = sync_product(concat_n2(), other);
  CHECK(inter.place_count() == 2);
  CHECK(inter.transition_count() == concat_n2().transition_count() + other.transition_count());

  CHECK_THROWS_AS(sync_product(concat_n2(), concat_n2()), std::invalid_argument);
}

TEST_CASE("firing keeps the marking domain") {
  auto n = fake_concat_n1();
  for (const auto& m : all_vectors(2, 3))
    for (TransitionId t = 0; t < n.transition_count(); ++t)
      if (auto r = fire(n, to_marking(m), t)) CHECK(r->size() == 2);
}
