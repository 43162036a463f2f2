#include "polyabs/check.hpp"

#include <nlohmann/json.hpp>

#include <iomanip>
#include <map>
#include <sstream>

namespace polyabs {

namespace {

using Json = nlohmann::ordered_json;

struct RenderedModel {
  std::vector<std::pair<std::string, std::string>> markings;  // namespace, formatted marking
  std::optional<std::string> label;
};

// Groups countermodel variables by vector namespace and formats each group
// as a marking of the net the namespace belongs to.
RenderedModel render(const Assignment& model, const ReductionRule& rule) {
  RenderedModel out;
  std::map<std::string, std::map<std::string, Tokens>> groups;
  for (const auto& [var, value] : model) {
    if (var == kLabelVar) {
      try {
        out.label = rule.alphabet.symbol(static_cast<std::int64_t>(value));
      } catch (const std::out_of_range&) {
        out.label = "#" + std::to_string(value);
      }
      continue;
    }
    auto dot = var.find('.');
    if (dot == std::string::npos) continue;
    groups[var.substr(0, dot)][var.substr(dot + 1)] = value;
  }
  for (const auto& [ns, values] : groups) {
    const PetriNet& net = ns.rfind("n2", 0) == 0 ? rule.reduced : rule.initial;
    Marking m = net.zero_marking();
    for (const auto& [p, v] : values)
      if (auto i = net.find_place(p)) m[*i] = v;
    out.markings.emplace_back(ns, net.format(m));
  }
  // Namespaces without constants (an empty net) print as the empty marking.
  return out;
}

Json counterexample_json(const OracleResult& r) {
  Json j;
  j["ok"] = r.ok();
  j["truncated"] = r.truncated;
  if (r.counterexample) {
    j["label"] = r.counterexample->label ? Json(*r.counterexample->label) : Json(nullptr);
    j["markings"] = r.counterexample->markings;
    j["description"] = r.counterexample->description;
  }
  return j;
}

}  // namespace

std::string report_json(const Verdict& v, const ReductionRule& rule, bool include_timing) {
  Json j;
  j["rule"] = v.rule;
  j["verdict"] = to_string(v.overall);
  Json alphabet = Json::object();
  for (const auto& s : v.alphabet.symbols()) alphabet[s] = v.alphabet.code(s);
  j["alphabet"] = alphabet;

  Json certs = Json::array();
  for (const auto& c : v.certificates) {
    const PetriNet& net = c.net == Direction::N1 ? rule.initial : rule.reduced;
    Json cj;
    cj["net"] = to_string(c.net);
    cj["source"] = c.certificate.source == FlatCertificate::Source::Imported ? "imported" : "searched";
    Json seqs = Json::array();
    for (const auto& s : c.certificate.sequences) {
      Json names = Json::array();
      for (auto t : s) names.push_back(net.transition(t).name);
      seqs.push_back(names);
    }
    cj["sequences"] = seqs;
    if (c.search) {
      cj["search"] = {{"status", c.search->status == SearchResult::Status::Found     ? "found"
                                 : c.search->status == SearchResult::Status::Timeout ? "timeout"
                                                                                     : "unknown"},
                      {"iterations", c.search->iterations}};
    }
    if (c.certification) {
      cj["status"] = to_string(c.certification->status);
      cj["reflexive"] = to_string(c.certification->reflexive.status);
      cj["closure"] = to_string(c.certification->closure.status);
      cj["fast_eq"] = to_string(c.certification->fast_eq.status);
    } else {
      cj["status"] = "uncertified";
    }
    cj["tau_star_form"] = c.tau_star_form;
    certs.push_back(cj);
  }
  j["certificates"] = certs;

  Json queries = Json::array();
  for (const auto& q : v.queries) {
    Json qj;
    qj["kind"] = to_string(q.kind);
    qj["direction"] = to_string(q.direction);
    qj["verdict"] = to_string(q.verdict.status);
    if (q.verdict.invalid()) {
      Json cm = Json::object();
      for (const auto& [k, val] : q.verdict.countermodel) cm[k] = val;
      qj["countermodel"] = cm;
    } else {
      qj["countermodel"] = nullptr;
    }
    if (q.verdict.unknown()) qj["reason"] = to_string(q.verdict.reason);
    if (include_timing) qj["wall_ms"] = q.verdict.wall.count();
    queries.push_back(qj);
  }
  j["queries"] = queries;

  if (v.failing) {
    const auto& q = v.queries[*v.failing];
    j["failing"] = {{"kind", to_string(q.kind)}, {"direction", to_string(q.direction)}, {"narrative", v.narrative}};
  } else {
    j["failing"] = nullptr;
    if (!v.narrative.empty()) j["note"] = v.narrative;
  }

  if (v.oracle) {
    const auto& r = v.oracle->report;
    j["oracle"] = {{"disagrees", v.oracle->disagrees},
                   {"note", v.oracle->note},
                   {"coherency_N1", counterexample_json(r.coherency[0])},
                   {"coherency_N2", counterexample_json(r.coherency[1])},
                   {"S1_N1->N2", counterexample_json(r.s1[0])},
                   {"S1_N2->N1", counterexample_json(r.s1[1])},
                   {"S2_N1->N2", counterexample_json(r.s2[0])},
                   {"S2_N2->N1", counterexample_json(r.s2[1])},
                   {"S3_N1->N2", counterexample_json(r.s3[0])},
                   {"S3_N2->N1", counterexample_json(r.s3[1])}};
  } else {
    j["oracle"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string report_human(const Verdict& v, const ReductionRule& rule) {
  std::ostringstream os;
  os << "rule " << v.rule << ": " << to_string(v.overall) << "\n";
  for (const auto& c : v.certificates) {
    os << "  certificate " << to_string(c.net) << " ("
       << (c.certificate.source == FlatCertificate::Source::Imported ? "imported" : "searched")
       << "): " << (c.text.empty() ? "<empty>" : c.text);
    if (c.certification) {
      os << "  [" << to_string(c.certification->status) << ", fast-eq " << to_string(c.certification->fast_eq.status)
         << ", tau* " << c.tau_star_form << "]";
    }
    os << "\n";
  }
  for (const auto& q : v.queries) {
    os << "  " << std::left << std::setw(16) << (to_string(q.kind) + " " + to_string(q.direction)) << std::setw(9)
       << to_string(q.verdict.status);
    if (q.verdict.unknown()) os << "(" << to_string(q.verdict.reason) << ") ";
    os << q.verdict.wall.count() << " ms\n";
  }
  if (v.failing) {
    const auto& q = v.queries[*v.failing];
    os << "first failing requirement: " << to_string(q.kind) << " " << to_string(q.direction) << "\n";
    os << "  " << v.narrative << "\n";
    auto r = render(q.verdict.countermodel, rule);
    if (r.label) os << "  label: " << *r.label << "\n";
    for (const auto& [ns, m] : r.markings) os << "  " << ns << " = " << m << "\n";
  } else if (!v.narrative.empty()) {
    os << "  " << v.narrative << "\n";
  }
  if (v.oracle) {
    os << "oracle: " << (v.oracle->report.any_counterexample() ? "counterexample found" : "no counterexample within bound");
    if (v.oracle->disagrees) os << " (DISAGREES with solver)";
    os << "\n";
    if (!v.oracle->note.empty()) os << "  " << v.oracle->note << "\n";
    const auto& r = v.oracle->report;
    const std::pair<const char*, const OracleResult*> checks[] = {
        {"coherency N1", &r.coherency[0]}, {"coherency N2", &r.coherency[1]}, {"S1 N1->N2", &r.s1[0]},
        {"S1 N2->N1", &r.s1[1]},           {"S2 N1->N2", &r.s2[0]},          {"S2 N2->N1", &r.s2[1]},
        {"S3 N1->N2", &r.s3[0]},           {"S3 N2->N1", &r.s3[1]}};
    for (const auto& [name, res] : checks)
      if (res->counterexample) os << "  " << name << ": " << res->counterexample->description << "\n";
  }
  return os.str();
}

}  // namespace polyabs
