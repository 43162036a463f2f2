#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polyabs/accel.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>

using namespace polyabs;
using namespace testing;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

Correspondence concat_e(const PetriNet& n1, const PetriNet& n2) {
  return Correspondence::build(parse_formula("x = y1 + y2"), n1, n2);
}

}  // namespace

TEST_CASE("certificate text format") {
  using Names = std::vector<std::vector<std::string>>;
  CHECK(parse_certificate("tau; tau") == Names{{"tau"}, {"tau"}});
  CHECK(parse_certificate("").empty());
  CHECK(parse_certificate("# only a comment\n\n") == Names{});
  CHECK(parse_certificate("t1 t2\n\n  t3 # trailing\n") == Names{{"t1", "t2"}, {"t3"}});

  auto n = concat_n1();
  auto tt = resolve_certificate(parse_certificate("tau; tau"), n);
  REQUIRE(tt.sequences.size() == 2);
  CHECK(tt.sequences[0] == FiringSequence{n.transition_index("tau")});
  CHECK(tt.source == FlatCertificate::Source::Imported);
  CHECK_THROWS_AS(resolve_certificate(parse_certificate("nope"), n), CertificateError);
  CHECK_THROWS_AS(resolve_certificate(parse_certificate("a"), n), NonSilentTransitionInCertificate);

  CHECK(import_certificate(write_temp("polyabs_empty.cert", ""), n).sequences.empty());
  CHECK(import_certificate(write_temp("polyabs_tt.cert", "tau tau\n"), n).sequences ==
        std::vector<FiringSequence>{{1, 1}});
  CHECK_THROWS(import_certificate("/nonexistent/file.cert", n));
}

TEST_CASE("certification of concat certificates") {
  auto n1 = concat_n1();
  auto n2 = concat_n2();
  auto e = concat_e(n1, n2);
  auto tau = n1.transition_index("tau");
  auto side_for = [&](std::vector<FiringSequence> seqs) {
    FlatCertificate c;
    c.sequences = std::move(seqs);
    return Side{&n1, parse_formula("y2 = 0"), "n1", c.tau_star(n1)};
  };

  auto good = certify(side_for({{tau}}), e, Direction::N1, solver());
  CHECK(good.status == Certification::Status::Certified);
  CHECK(good.fast_eq_valid());

  auto empty = certify(side_for({}), e, Direction::N1, solver());
  CHECK(empty.status == Certification::Status::Refuted);
  REQUIRE(empty.refuted_by);
  CHECK(*empty.refuted_by == QueryKind::CertClosure);
  CHECK(empty.closure.countermodel.at("n1.y1") == 1);
  CHECK(empty.closure.countermodel.at("n1.y2") == 0);
  CHECK(empty.closure.countermodel.at("n1''.y1") == 0);
  CHECK(empty.closure.countermodel.at("n1''.y2") == 1);

  // Pairs of steps miss odd runs: from (1, 0) one step reaches (0, 1).
  auto pairs = certify(side_for({{tau, tau}}), e, Direction::N1, solver());
  CHECK(pairs.status == Certification::Status::Refuted);
  REQUIRE(pairs.refuted_by);
  CHECK(*pairs.refuted_by == QueryKind::CertClosure);
}

TEST_CASE("certified tau* equals bounded silent reachability") {
  auto n1 = concat_n1();
  FlatCertificate cert;
  cert.sequences = {{n1.transition_index("tau")}};
  auto f = cert.tau_star(n1).apply(n1, "a", "b");
  for (const auto& m : all_vectors(2, 6)) {
    if (m[1] != 0) continue;
    auto reach = bfs_silent(n1, m, 6);
    for (const auto& m2 : all_vectors(2, 6))
      CHECK(eval(f, assign(n1, "b", m2, assign(n1, "a", m)), 6) == (reach.count(m2) == 1));
  }
}

TEST_CASE("certificate search") {
  auto n1 = concat_n1();
  auto r = search_certificate(n1, parse_formula("y2 = 0"), AccelParams{}, solver());
  REQUIRE(r.status == SearchResult::Status::Found);
  CHECK(r.certificate.sequences == std::vector<FiringSequence>{{n1.transition_index("tau")}});
  CHECK(r.certificate.source == FlatCertificate::Source::Searched);

  auto again = search_certificate(n1, parse_formula("y2 = 0"), AccelParams{}, solver());
  CHECK(again.certificate.sequences == r.certificate.sequences);

  auto none = search_certificate(concat_n2(), Formula::top(), AccelParams{}, solver());
  CHECK(none.status == SearchResult::Status::Found);
  CHECK(none.certificate.sequences.empty());

  PetriNet loops;
  loops.add_place("p");
  loops.add_place("q");
  loops.add_transition("s", Label::silent(), {{"p", 1}}, {{"p", 1}});
  loops.add_transition("t", Label::silent(), {{"q", 1}}, {{"q", 1}});
  auto idle = search_certificate(loops, Formula::top(), AccelParams{}, solver());
  CHECK(idle.status == SearchResult::Status::Found);
  CHECK(idle.certificate.sequences.empty());
}

TEST_CASE("search gives up after the iteration budget") {
  auto pool = fixture("swimming_pool_small");
  AccelParams tight;
  tight.max_iters = 1;
  auto r = search_certificate(pool.initial, pool.c1, tight, solver());
  CHECK(r.status == SearchResult::Status::Timeout);
  CHECK(r.iterations == 1);
}

TEST_CASE("fixture certificates certify") {
  for (const char* name : {"swimming_pool_small", "swimming_pool"}) {
    auto rule = fixture(name);
    REQUIRE(rule.initial_cert_path);
    auto cert = import_certificate(*rule.initial_cert_path, rule.initial);
    Side s{&rule.initial, rule.c1, "n1", cert.tau_star(rule.initial)};
    auto e = Correspondence::build(rule.e, rule.initial, rule.reduced);
    auto c = certify(s, e, Direction::N1, solver(120000));
    CHECK_MESSAGE(c.status == Certification::Status::Certified, name);
  }
}
