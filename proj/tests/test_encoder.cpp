#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polyabs/encoder.hpp"
#include "support.hpp"

using namespace polyabs;
using namespace testing;

namespace {

const std::string S(kSrc), D(kDst), L(kLabelVar);

Assignment pair(const PetriNet& n, const Vec& a, const Vec& b) { return assign(n, D, b, assign(n, S, a)); }

TauStarPredicate concat_tau() {
  auto n = concat_n1();
  return tau_star_from_certificate(n, {{n.transition_index("tau")}});
}

Side side(const PetriNet& n, const char* c, const char* ns, TauStarPredicate tau) {
  return Side{&n, parse_formula(c), ns, std::move(tau)};
}

SolverVerdict valid(const CoreQuery& q) {
  CHECK(q.formula.free_vars().empty());
  return check_validity(q.formula, solver());
}

// Every marking of `net` with components <= bound reachable silently from m,
// compared with the models of tau* in the same box.
void check_tau_star_exact(const PetriNet& net, const TauStarPredicate& tau, std::int64_t bound,
                          const std::function<bool(const Vec&)>& from_filter, bool expect_equal = true) {
  auto f = tau.apply(net, "a", "b");
  for (const auto& m : all_vectors(net.place_count(), bound)) {
    if (!from_filter(m)) continue;
    auto reach = bfs_silent(net, m, bound);
    std::set<Vec> models;
    for (const auto& m2 : all_vectors(net.place_count(), bound))
      if (eval(f, assign(net, "b", m2, assign(net, "a", m)), static_cast<std::uint64_t>(bound))) models.insert(m2);
    for (const auto& x : models) CHECK(reach.count(x) == 1);  // under-approximation always
    if (expect_equal) CHECK(models == reach);
  }
}

}  // namespace

TEST_CASE("label codes are alphabetical over both nets") {
  auto a = Alphabet::of(concat_n1(), concat_n2());
  CHECK(a.symbols() == std::vector<std::string>{"a", "b"});
  CHECK(a.code("a") == 1);
  CHECK(a.code("b") == 2);
  CHECK(a.code(Label::silent()) == 0);
  CHECK(a.symbol(0) == "tau");
  CHECK_THROWS_AS(a.code("zz"), std::out_of_range);
  CHECK(Alphabet::of(fake_concat_n1(), concat_n2()).code("d") == 3);
}

TEST_CASE("enabling and displacement") {
  auto n = concat_n1();
  auto tau = n.transition_index("tau");
  for (const auto& m : all_vectors(2, 3)) {
    CHECK(eval(enbl(n, tau), assign(n, S, m)) == (m[0] >= 1));
    for (const auto& m2 : all_vectors(2, 4))
      CHECK(eval(delta(n, tau), pair(n, m, m2)) == (m2[0] == m[0] - 1 && m2[1] == m[1] + 1));
  }
  PetriNet loop;
  loop.add_place("p");
  auto t = loop.add_transition("t", Label::silent(), {{"p", 1}}, {{"p", 1}});
  for (const auto& m : all_vectors(1, 3))
    for (const auto& m2 : all_vectors(1, 3)) CHECK(eval(delta(loop, t), pair(loop, m, m2)) == (m == m2));
}

TEST_CASE("observable transition relation agrees with firing") {
  auto n = concat_n2();
  auto al = Alphabet::of(concat_n1(), n);
  auto t = trans_pred(n, al);
  auto with_label = [&](const Vec& a, const Vec& b, std::int64_t l) {
    auto x = pair(n, a, b);
    x[L] = static_cast<std::uint64_t>(l);
    return eval(t, x);
  };
  CHECK(with_label({1}, {0}, al.code("b")));
  CHECK_FALSE(with_label({0}, {1}, al.code("b")));
  for (const auto& m : all_vectors(1, 3))
    for (const auto& m2 : all_vectors(1, 3)) {
      CHECK_FALSE(with_label(m, m2, 0));
      for (const auto& s : al.symbols()) {
        bool fires = false;
        for (TransitionId i = 0; i < n.transition_count(); ++i)
          if (n.transition(i).label == Label::observable(s)) fires = fires || naive_fire(n, m, {i}) == m2;
        CHECK(with_label(m, m2, al.code(s)) == fires);
      }
    }
}

TEST_CASE("silent step relation") {
  auto n = concat_n1();
  CHECK(eval(tau_step(n), pair(n, {2, 0}, {1, 1})));
  CHECK(tau_step(concat_n2()).is_false());
  for (const auto& m2 : all_vectors(2, 3)) CHECK_FALSE(eval(tau_step(n), pair(n, {0, 0}, m2)));
}

TEST_CASE("tau* from a certificate matches silent reachability") {
  auto n = concat_n1();
  check_tau_star_exact(n, concat_tau(), 6, [](const Vec& m) { return m[1] == 0; });
  check_tau_star_exact(n, concat_tau(), 4, [](const Vec&) { return true; });

  auto empty = tau_star_from_certificate(n, {});
  for (const auto& m : all_vectors(2, 3))
    for (const auto& m2 : all_vectors(2, 3))
      CHECK(eval(empty.apply(n, "a", "b"), assign(n, "b", m2, assign(n, "a", m))) == (m == m2));

  CHECK_THROWS_AS(tau_star_from_certificate(n, {{n.transition_index("a")}}), NonSilentTransitionInCertificate);
}

TEST_CASE("tau* with several sequences is an under-approximation") {
  PetriNet chain;
  chain.add_place("p");
  chain.add_place("q");
  chain.add_place("r");
  auto t1 = chain.add_transition("t1", Label::silent(), {{"p", 1}}, {{"q", 1}});
  auto t2 = chain.add_transition("t2", Label::silent(), {{"q", 1}}, {{"r", 1}});
  // Tokens are conserved, so starting within the total bound keeps every run in the box.
  auto all = [](const Vec& m) { return m[0] + m[1] + m[2] <= 3; };
  check_tau_star_exact(chain, tau_star_from_certificate(chain, {{t1}, {t2}}), 3, all);
  // The reversed order misses runs that need t1 before t2.
  check_tau_star_exact(chain, tau_star_from_certificate(chain, {{t2}, {t1}}), 3, all, false);
  auto rev = tau_star_from_certificate(chain, {{t2}, {t1}}).apply(chain, "a", "b");
  CHECK_FALSE(eval(rev, assign(chain, "b", {0, 0, 1}, assign(chain, "a", {1, 0, 0})), 3));
  // A pair step such as t1.t2 accelerates with its own hurdle.
  check_tau_star_exact(chain, tau_star_from_certificate(chain, {{t1, t2}}), 3, all, false);
}

TEST_CASE("silent prefix then one observable step (tleft)") {
  auto n = concat_n1();
  auto al = Alphabet::of(n, concat_n2());
  auto f = tleft(n, al, concat_tau(), S, D);
  auto holds = [&](const Vec& a, const Vec& b, std::int64_t l) {
    auto x = pair(n, a, b);
    x[L] = static_cast<std::uint64_t>(l);
    return eval(f, x, 5);
  };
  CHECK(holds({2, 0}, {1, 0}, al.code("b")));
  for (const auto& m2 : all_vectors(2, 3)) CHECK_FALSE(holds({0, 0}, m2, al.code("b")));
  // For C-markings, tleft is exactly the relation "silent steps then a".
  for (const auto& m : all_vectors(2, 3)) {
    if (m[1] != 0) continue;
    for (const auto& s : al.symbols()) {
      auto ref = bfs_left_step(n, m, s, 5);
      for (const auto& m2 : all_vectors(2, 4)) CHECK(holds(m, m2, al.code(s)) == (ref.count(m2) == 1));
    }
  }
}

TEST_CASE("observable step through a coherent marking (that)") {
  auto n = concat_n1();
  auto al = Alphabet::of(n, concat_n2());
  auto c = parse_formula("y2 = 0");
  auto f = that(n, al, c, concat_tau(), S, D);
  auto holds = [&](const Vec& a, const Vec& b, std::int64_t l) {
    auto x = pair(n, a, b);
    x[L] = static_cast<std::uint64_t>(l);
    return eval(f, x, 4);
  };
  CHECK(holds({2, 0}, {0, 1}, al.code("b")));
  CHECK(holds({1, 0}, {1, 0}, 0));
  for (const auto& m2 : all_vectors(2, 2)) CHECK_FALSE(holds({0, 0}, m2, al.code("b")));
  // On a coherent net, that = (label 0 and silent run) or weak a-step.
  for (const auto& m : all_vectors(2, 2)) {
    if (m[1] != 0) continue;
    for (const auto& m2 : all_vectors(2, 3)) {
      CHECK(holds(m, m2, 0) == (bfs_silent(n, m, 4).count(m2) == 1));
      for (const auto& s : al.symbols()) {
        bool weak = false;
        for (const auto& mid : bfs_left_step(n, m, s, 4)) weak = weak || bfs_silent(n, mid, 4).count(m2);
        CHECK(holds(m, m2, al.code(s)) == weak);
      }
    }
  }
}

TEST_CASE("constrained compatibility predicate") {
  auto n1 = concat_n1();
  auto n2 = concat_n2();
  auto e = Correspondence::build(parse_formula("x = y1 + y2"), n1, n2);
  auto f = cec_pred(at(parse_formula("y2 = 0"), n1, "u"), e, at(Formula::top(), n2, "v"), "u", "v");
  auto at_pair = [&](const Vec& m1, const Vec& m2) { return eval(f, assign(n2, "v", m2, assign(n1, "u", m1))); };
  CHECK_FALSE(at_pair({1, 1}, {2}));
  CHECK(at_pair({2, 0}, {2}));
  CHECK_FALSE(at_pair({2, 0}, {1}));
}

TEST_CASE("core queries on concat and its variants") {
  auto n1 = concat_n1();
  auto n2 = concat_n2();
  auto al = Alphabet::of(n1, n2);
  auto e = Correspondence::build(parse_formula("x = y1 + y2"), n1, n2);
  Side s1 = side(n1, "y2 = 0", "n1", concat_tau());
  Side s2 = side(n2, "true", "n2", tau_star_from_certificate(n2, {}));

  CHECK(valid(core0(s1, al, Direction::N1)).valid());
  CHECK(valid(core0(s2, al, Direction::N2)).valid());
  CHECK(valid(core1(s1, e, s2, Direction::N1ToN2)).valid());
  CHECK(valid(core1(s2, e.reversed(), s1, Direction::N2ToN1)).valid());
  CHECK(valid(core2(s1, e, s2, Direction::N1ToN2)).valid());
  CHECK(valid(core2(s2, e.reversed(), s1, Direction::N2ToN1)).valid());
  CHECK(valid(core3(s1, e, s2, al, Direction::N1ToN2)).valid());
  CHECK(valid(core3(s2, e.reversed(), s1, al, Direction::N2ToN1)).valid());

  auto wrong = Correspondence::build(parse_formula("x = y1"), n1, n2);
  auto c2 = valid(core2(s1, wrong, s2, Direction::N1ToN2));
  REQUIRE(c2.invalid());
  CHECK(c2.countermodel["n1.y1"] == 1);
  CHECK(c2.countermodel["n1.y2"] == 0);
  CHECK(c2.countermodel["n2.x"] == 1);
  CHECK(valid(core3(s1, wrong, s2, al, Direction::N1ToN2)).invalid());
}

TEST_CASE("Core0 detects the incoherence introduced by d") {
  auto n1 = fake_concat_n1();
  auto n2 = concat_n2();
  auto al = Alphabet::of(n1, n2);
  Side s1 = side(n1, "y2 = 0", "n1", tau_star_from_certificate(n1, {{n1.transition_index("tau")}}));
  auto v = valid(core0(s1, al, Direction::N1));
  REQUIRE(v.invalid());
  CHECK(v.countermodel["lbl"] == static_cast<std::uint64_t>(al.code("d")));
  CHECK(v.countermodel["n1'.y2"] >= 1);
}

TEST_CASE("Core0 is vacuous without observable transitions") {
  PetriNet n;
  n.add_place("p");
  n.add_place("q");
  auto t = n.add_transition("t", Label::silent(), {{"p", 1}}, {{"q", 1}});
  Alphabet al;
  Side s = side(n, "q = 0", "n1", tau_star_from_certificate(n, {{t}}));
  CHECK(valid(core0(s, al, Direction::N1)).valid());
}

TEST_CASE("Core1 fails when E cannot be met") {
  auto n1 = concat_n1();
  auto n2 = concat_n2();
  auto e = Correspondence::build(parse_formula("x = y1 and x = y2 - 1 and x = y1 + 5"), n1, n2);
  Side s1 = side(n1, "y2 >= 1", "n1", concat_tau());
  Side s2 = side(n2, "true", "n2", tau_star_from_certificate(n2, {}));
  auto v = valid(core1(s1, e, s2, Direction::N1ToN2));
  REQUIRE(v.invalid());
  CHECK(v.countermodel["n1.y2"] >= 1);
}

TEST_CASE("Core3 on two label-identical nets without silent transitions") {
  PetriNet a, b;
  a.add_place("p");
  a.add_transition("t", Label::observable("a"), {}, {{"p", 1}});
  b.add_place("q");
  b.add_transition("u", Label::observable("a"), {}, {{"q", 1}});
  auto al = Alphabet::of(a, b);
  Side sa = side(a, "true", "n1", tau_star_from_certificate(a, {}));
  Side sb = side(b, "true", "n2", tau_star_from_certificate(b, {}));
  auto linked = Correspondence::build(parse_formula("p = q"), a, b);
  CHECK(valid(core3(sa, linked, sb, al, Direction::N1ToN2)).valid());
  CHECK(valid(core3(sb, linked.reversed(), sa, al, Direction::N2ToN1)).valid());
  // With E = true the target marking after the step is unconstrained, so the
  // matching requirement fails (e.g. q' = q + 2).
  auto unrelated = Correspondence::build(Formula::top(), a, b);
  CHECK(valid(core3(sa, unrelated, sb, al, Direction::N1ToN2)).invalid());
}

TEST_CASE("certification queries") {
  auto n1 = concat_n1();
  auto n2 = concat_n2();
  auto e = Correspondence::build(parse_formula("x = y1 + y2"), n1, n2);
  Side s = side(n1, "y2 = 0", "n1", concat_tau());
  auto qs = cert_queries(s, e, Direction::N1);
  REQUIRE(qs.size() == 3);
  for (const auto& q : qs) CHECK(valid(q).valid());

  Side bare = side(n1, "y2 = 0", "n1", tau_star_from_certificate(n1, {}));
  CHECK(valid(reflexive_query(bare, Direction::N1)).valid());
  auto closure = valid(closure_query(bare, Direction::N1));
  REQUIRE(closure.invalid());
  CHECK(closure.countermodel["n1.y1"] == 1);
  CHECK(closure.countermodel["n1''.y2"] == 1);
}

TEST_CASE("derived tau* is the E-image relation") {
  auto n1 = concat_n1();
  auto n2 = concat_n2();
  auto e = Correspondence::build(parse_formula("x = y1 + y2"), n1, n2);
  auto f = tau_star_derived(e).apply(n1, "a", "b");
  for (const auto& m : all_vectors(2, 3))
    for (const auto& m2 : all_vectors(2, 3))
      CHECK(eval(f, assign(n1, "b", m2, assign(n1, "a", m)), 8) == (m[0] + m[1] == m2[0] + m2[1]));
}
