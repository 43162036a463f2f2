#include "polyabs/check.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace polyabs {

std::string to_string(Overall o) {
  switch (o) {
    case Overall::Sound: return "SOUND";
    case Overall::Unsound: return "UNSOUND";
    case Overall::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) f(i);
    });
  for (auto& t : pool) t.join();
}

SolverVerdict guarded_check(const Formula& f, const SolverConfig& cfg, const std::string& name) {
  try {
    return check_validity(f, cfg, name);
  } catch (const std::exception& e) {
    SolverVerdict v;
    v.reason = UnknownReason::ProcessError;
    v.detail = e.what();
    return v;
  }
}

std::string script_stem(std::size_t index, const CoreQuery& q) {
  std::string d = to_string(q.direction);
  for (auto& c : d)
    if (c == '-' || c == '>') c = '_';
  std::string stem = std::to_string(index);
  if (stem.size() < 2) stem = "0" + stem;
  return stem + "_" + to_string(q.kind) + "_" + d;
}

std::string net_label(Direction d) { return d == Direction::N1 ? "N1" : "N2"; }

std::string narrative_for(const QueryReport& q) {
  const std::string dir = to_string(q.direction);
  switch (q.kind) {
    case QueryKind::Core0:
      return "(" + dir + ", C" + dir.substr(1) + ") is not coherent: an observable step from a coherent marking reaches a marking that "
             "no coherent marking after the same step leads to silently";
    case QueryKind::Core1:
      return "Core1 " + dir + ": some marking satisfying the source constraint has no compatible marking satisfying "
             "the target constraint";
    case QueryKind::Core2:
      return "Core2 " + dir + ": a silent transition of the source net breaks compatibility with E";
    case QueryKind::Core3:
      return "Core3 " + dir + ": an observable (or empty) step of the source net cannot be matched by the target net";
    default:
      return to_string(q.kind) + " " + dir + " failed";
  }
}

}  // namespace

Verdict check_rule(const ReductionRule& rule, const CheckOptions& options) {
  Verdict v;
  v.rule = rule.name;
  v.alphabet = rule.alphabet;

  const Correspondence e12 = Correspondence::build(rule.e, rule.initial, rule.reduced);
  const Correspondence e21 = e12.reversed();
  struct NetSide {
    const PetriNet* net;
    Formula c;
    std::string ns;
    Direction d;
    std::optional<std::string> cert_path;
    const Correspondence* e;
  };
  const NetSide nets[2] = {
      {&rule.initial, rule.c1, "n1", Direction::N1, options.cert1 ? options.cert1 : rule.initial_cert_path, &e12},
      {&rule.reduced, rule.c2, "n2", Direction::N2, options.cert2 ? options.cert2 : rule.reduced_cert_path, &e21},
  };

  // (1) certificates
  for (const auto& ns : nets) {
    CertificateReport cr;
    cr.net = ns.d;
    if (ns.cert_path) {
      cr.certificate = import_certificate(*ns.cert_path, *ns.net);
    } else if (!ns.net->has_silent_transitions()) {
      cr.certificate.source = FlatCertificate::Source::Searched;
    } else {
      auto r = search_certificate(*ns.net, ns.c, options.accel, options.solver, "search_" + net_label(ns.d));
      cr.certificate = r.certificate;
      cr.search = r;
    }
    cr.text = cr.certificate.to_string(*ns.net);
    v.certificates.push_back(std::move(cr));
  }
  for (const auto& cr : v.certificates)
    if (cr.search && cr.search->status != SearchResult::Status::Found) {
      v.narrative = "no flat certificate found for " + net_label(cr.net) + ": " + cr.search->detail;
      return v;
    }

  // (2) certification
  std::vector<Side> cert_sides;
  for (std::size_t i = 0; i < 2; ++i)
    cert_sides.push_back({nets[i].net, nets[i].c, nets[i].ns, v.certificates[i].certificate.tau_star(*nets[i].net)});
  parallel_for(2, options.jobs, [&](std::size_t i) {
    v.certificates[i].certification =
        certify(cert_sides[i], *nets[i].e, nets[i].d, options.solver, "cert_" + net_label(nets[i].d));
  });
  for (const auto& cr : v.certificates) {
    const auto& c = *cr.certification;
    if (c.status != Certification::Status::Certified) {
      v.narrative = "silent reachability certificate for " + net_label(cr.net) + " is " + to_string(c.status) +
                    (c.refuted_by ? " by the " + to_string(*c.refuted_by) + " query" : std::string());
      return v;
    }
  }

  // tau* handed to the core queries
  std::vector<Side> sides = cert_sides;
  for (std::size_t i = 0; i < 2; ++i) {
    const bool fast = v.certificates[i].certification->fast_eq_valid();
    if (options.tau_star == TauStarMode::Derived && !fast) {
      v.narrative = "derived tau* requested but FastEq is not valid for " + net_label(nets[i].d);
      return v;
    }
    if (options.tau_star != TauStarMode::Certificate && fast) {
      sides[i].tau = tau_star_derived(*nets[i].e);
      v.certificates[i].tau_star_form = "derived";
    }
  }

  // (3)-(4) core queries, in a fixed order
  const Side &s1 = sides[0], &s2 = sides[1];
  std::vector<CoreQuery> qs{
      core0(s1, rule.alphabet, Direction::N1),
      core0(s2, rule.alphabet, Direction::N2),
      core1(s1, e12, s2, Direction::N1ToN2),
      core1(s2, e21, s1, Direction::N2ToN1),
      core2(s1, e12, s2, Direction::N1ToN2),
      core2(s2, e21, s1, Direction::N2ToN1),
      core3(s1, e12, s2, rule.alphabet, Direction::N1ToN2),
      core3(s2, e21, s1, rule.alphabet, Direction::N2ToN1),
  };
  v.queries.resize(qs.size());
  parallel_for(qs.size(), options.jobs, [&](std::size_t i) {
    v.queries[i] = {qs[i].kind, qs[i].direction, guarded_check(qs[i].formula, options.solver, script_stem(i + 1, qs[i]))};
  });

  bool any_unknown = false;
  for (std::size_t i = 0; i < v.queries.size(); ++i) {
    if (v.queries[i].verdict.invalid() && !v.failing) v.failing = i;
    any_unknown = any_unknown || v.queries[i].verdict.unknown();
  }
  if (v.failing) {
    v.overall = Overall::Unsound;
    v.narrative = narrative_for(v.queries[*v.failing]);
  } else if (any_unknown) {
    v.overall = Overall::Inconclusive;
    v.narrative = "some core requirement could not be decided by the solver";
  } else {
    v.overall = Overall::Sound;
  }

  if (options.oracle) {
    OracleSummary os;
    os.report = run_oracle(rule, *options.oracle);
    const bool found = os.report.any_counterexample();
    if (v.overall == Overall::Sound && found) {
      os.disagrees = true;
      os.note = "solver proved the rule sound but the bounded oracle found a counterexample";
    } else if (v.overall == Overall::Unsound && !found) {
      const auto& cm = v.queries[*v.failing].verdict.countermodel;
      bool within = std::all_of(cm.begin(), cm.end(), [&](const auto& kv) {
        return kv.first == kLabelVar || kv.second <= options.oracle->max_tokens;
      });
      if (within) {
        os.disagrees = true;
        os.note = "solver refuted the rule within the oracle bound but the oracle found no counterexample";
      } else {
        os.note = "solver countermodel lies outside the oracle bound";
      }
    }
    v.oracle = std::move(os);
  }
  return v;
}

int exit_code(const Verdict& v) {
  if (v.oracle && v.oracle->disagrees) return 4;
  switch (v.overall) {
    case Overall::Sound: return 0;
    case Overall::Unsound: return 1;
    case Overall::Inconclusive: return 2;
  }
  return 2;
}

}  // namespace polyabs
