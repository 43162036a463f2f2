#include "polyabs/accel.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace polyabs {

TauStarPredicate FlatCertificate::tau_star(const PetriNet& net) const {
  return tau_star_from_certificate(net, sequences,
                                   source == Source::Imported ? TauStarSource::Imported : TauStarSource::Searched);
}

std::string FlatCertificate::to_string(const PetriNet& net) const {
  std::string out;
  for (const auto& seq : sequences) {
    if (!out.empty()) out += "; ";
    for (std::size_t i = 0; i < seq.size(); ++i) out += (i ? " " : "") + net.transition(seq[i]).name;
  }
  return out;
}

std::vector<std::vector<std::string>> parse_certificate(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream entries(line);
    std::string entry;
    while (std::getline(entries, entry, ';')) {
      std::istringstream words(entry);
      std::vector<std::string> seq;
      for (std::string w; words >> w;) seq.push_back(w);
      if (!seq.empty()) out.push_back(std::move(seq));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> read_certificate_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CertificateError("cannot open certificate file '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_certificate(ss.str());
}

FlatCertificate resolve_certificate(const std::vector<std::vector<std::string>>& names, const PetriNet& net,
                                    FlatCertificate::Source source) {
  FlatCertificate cert;
  cert.source = source;
  for (std::size_t i = 0; i < names.size(); ++i) {
    FiringSequence seq;
    for (const auto& n : names[i]) {
      auto t = net.find_transition(n);
      if (!t) throw CertificateError("unknown transition '" + n + "'", i + 1);
      if (!net.transition(*t).label.is_silent()) throw NonSilentTransitionInCertificate(n);
      seq.push_back(*t);
    }
    cert.sequences.push_back(std::move(seq));
  }
  return cert;
}

FlatCertificate import_certificate(const std::string& path, const PetriNet& net) {
  return resolve_certificate(read_certificate_file(path), net, FlatCertificate::Source::Imported);
}

namespace {

// Calls `visit` on every word over `alphabet` of length 1..max_len in shortlex
// order until it returns true.
template <typename Visit>
bool shortlex(const std::vector<TransitionId>& alphabet, std::size_t max_len, Visit&& visit) {
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::size_t> idx(len, 0);
    for (;;) {
      FiringSequence w(len);
      for (std::size_t i = 0; i < len; ++i) w[i] = alphabet[idx[i]];
      if (visit(w)) return true;
      std::size_t pos = len;
      while (pos > 0 && ++idx[pos - 1] == alphabet.size()) idx[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return false;
}

// tau*(x, y) with both vectors fixed to concrete markings.
Formula pinned(const TauStarPredicate& tau, const PetriNet& net, const Assignment& x, const Assignment& y) {
  std::map<std::string, LinearTerm> m;
  for (const auto& p : net.places()) {
    m[place_var(kSrc, p)] = static_cast<std::int64_t>(x.at(p));
    m[place_var(kDst, p)] = static_cast<std::int64_t>(y.at(p));
  }
  return substitute(tau.formula, m);
}

Assignment marking_in(const Assignment& model, const PetriNet& net, std::string_view ns) {
  Assignment out;
  for (const auto& p : net.places()) {
    auto it = model.find(place_var(ns, p));
    out[p] = it == model.end() ? 0 : it->second;
  }
  return out;
}

std::string name(const std::string& prefix, const std::string& rest) {
  return prefix.empty() ? std::string() : prefix + "_" + rest;
}

}  // namespace

SearchResult search_certificate(const PetriNet& net, const Formula& c, const AccelParams& params,
                                const SolverConfig& solver, const std::string& emit_prefix) {
  SearchResult result;
  result.certificate.source = FlatCertificate::Source::Searched;
  std::vector<TransitionId> silent;
  for (TransitionId t = 0; t < net.transition_count(); ++t)
    if (net.transition(t).label.is_silent()) silent.push_back(t);

  SolverConfig probe = solver;
  probe.timeout_ms = params.probe_timeout_ms;
  probe.minimize = true;
  std::size_t probes = 0;

  for (std::size_t iter = 0; iter <= params.max_iters; ++iter) {
    result.iterations = iter;
    Side side{&net, c, "n", result.certificate.tau_star(net)};
    auto closure = check_validity(closure_query(side, Direction::N1).formula, probe,
                                  name(emit_prefix, "iter" + std::to_string(iter) + "_closure"));
    if (closure.valid()) {
      result.status = SearchResult::Status::Found;
      return result;
    }
    if (closure.unknown()) {
      result.status = SearchResult::Status::Unknown;
      result.detail = "closure query unknown (" + to_string(closure.reason) + ")";
      return result;
    }
    if (iter == params.max_iters) break;

    const Assignment x = marking_in(closure.countermodel, net, primed("n", 0));
    const Assignment y = marking_in(closure.countermodel, net, primed("n", 2));
    bool extended = shortlex(silent, params.max_seq_len, [&](const FiringSequence& w) {
      if (hurdle_delta(net, w).delta.is_zero()) return false;
      const auto& seqs = result.certificate.sequences;
      if (std::find(seqs.begin(), seqs.end(), w) != seqs.end()) return false;
      FlatCertificate next = result.certificate;
      next.sequences.push_back(w);
      auto r = check_satisfiable(pinned(next.tau_star(net), net, x, y), probe,
                                 name(emit_prefix, "iter" + std::to_string(iter) + "_probe" + std::to_string(++probes)));
      if (r.answer != SatResult::Answer::Sat) return false;
      result.certificate = std::move(next);
      return true;
    });
    if (!extended) {
      result.detail = "no sequence of length <= " + std::to_string(params.max_seq_len) + " covers the escaping step";
      result.status = SearchResult::Status::Timeout;
      return result;
    }
  }
  result.status = SearchResult::Status::Timeout;
  result.detail = "closure not reached within " + std::to_string(params.max_iters) + " iterations";
  return result;
}

std::string to_string(Certification::Status s) {
  switch (s) {
    case Certification::Status::Certified: return "certified";
    case Certification::Status::Refuted: return "refuted";
    case Certification::Status::Unknown: return "unknown";
  }
  return "?";
}

Certification certify(const Side& side, const Correspondence& e, Direction which, const SolverConfig& solver,
                      const std::string& emit_prefix) {
  Certification c;
  c.reflexive = check_validity(reflexive_query(side, which).formula, solver, name(emit_prefix, "reflexive"));
  c.closure = check_validity(closure_query(side, which).formula, solver, name(emit_prefix, "closure"));
  c.fast_eq = check_validity(fast_eq_query(side, e, which).formula, solver, name(emit_prefix, "fasteq"));
  if (c.reflexive.invalid()) c.refuted_by = QueryKind::CertReflexive;
  else if (c.closure.invalid()) c.refuted_by = QueryKind::CertClosure;
  if (c.refuted_by) c.status = Certification::Status::Refuted;
  else if (c.reflexive.valid() && c.closure.valid()) c.status = Certification::Status::Certified;
  else c.status = Certification::Status::Unknown;
  return c;
}

}  // namespace polyabs
