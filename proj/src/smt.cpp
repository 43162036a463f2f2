#include "polyabs/smt.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace polyabs {

std::string to_string(UnknownReason r) {
  switch (r) {
    case UnknownReason::None: return "none";
    case UnknownReason::Timeout: return "timeout";
    case UnknownReason::SolverUnknown: return "solver-unknown";
    case UnknownReason::ProcessError: return "process-error";
  }
  return "?";
}

std::string to_string(SolverVerdict::Status s) {
  switch (s) {
    case SolverVerdict::Status::Valid: return "valid";
    case SolverVerdict::Status::Invalid: return "invalid";
    case SolverVerdict::Status::Unknown: return "unknown";
  }
  return "?";
}

// Emission

namespace {

bool simple_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

std::string int_literal(std::int64_t v) {
  if (v >= 0) return std::to_string(v);
  return "(- " + std::to_string(0ULL - static_cast<unsigned long long>(v)) + ")";
}

void write_term(std::ostream& os, const LinearTerm& t) {
  std::vector<std::string> parts;
  for (const auto& [v, c] : t.coefficients()) {
    if (c == 1) parts.push_back(smt_symbol(v));
    else parts.push_back("(* " + int_literal(c) + " " + smt_symbol(v) + ")");
  }
  if (t.constant() != 0 || parts.empty()) parts.push_back(int_literal(t.constant()));
  if (parts.size() == 1) {
    os << parts.front();
    return;
  }
  os << "(+";
  for (const auto& p : parts) os << ' ' << p;
  os << ')';
}

const char* relation_op(Relation r) {
  switch (r) {
    case Relation::Eq: return "=";
    case Relation::Le: return "<=";
    case Relation::Lt: return "<";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
  }
  return "?";
}

void write_guards(std::ostream& os, const std::vector<std::string>& vars) {
  if (vars.size() > 1) os << "(and";
  for (const auto& v : vars) os << (vars.size() > 1 ? " " : "") << "(>= " << smt_symbol(v) << " 0)";
  if (vars.size() > 1) os << ')';
}

void write(std::ostream& os, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: os << "true"; return;
    case K::False: os << "false"; return;
    case K::Compare:
      os << '(' << relation_op(f.relation()) << ' ';
      write_term(os, f.lhs());
      os << ' ';
      write_term(os, f.rhs());
      os << ')';
      return;
    case K::Not:
      os << "(not ";
      write(os, f.children()[0]);
      os << ')';
      return;
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff: {
      const char* op = f.kind() == K::And ? "and" : f.kind() == K::Or ? "or" : f.kind() == K::Implies ? "=>" : "=";
      os << '(' << op;
      for (const auto& c : f.children()) {
        os << ' ';
        write(os, c);
      }
      os << ')';
      return;
    }
    case K::Exists:
    case K::Forall: {
      bool ex = f.kind() == K::Exists;
      os << (ex ? "(exists (" : "(forall (");
      bool first = true;
      for (const auto& v : f.bound_vars()) {
        os << (first ? "" : " ") << '(' << smt_symbol(v) << " Int)";
        first = false;
      }
      os << (ex ? ") (and " : ") (=> ");
      write_guards(os, f.bound_vars());
      os << ' ';
      write(os, f.body());
      os << "))";
      return;
    }
  }
}

}  // namespace

std::string smt_symbol(const std::string& name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name.front()));
  for (char c : name) simple = simple && simple_symbol_char(c);
  return simple ? name : "|" + name + "|";
}

std::string to_smtlib(const Formula& f) {
  std::ostringstream os;
  write(os, f);
  return os.str();
}

std::string emit_script(const std::vector<std::string>& consts, const Formula& assertion,
                        const std::vector<std::string>& comments) {
  std::ostringstream os;
  for (const auto& c : comments) os << "; " << c << '\n';
  os << "(set-option :produce-models true)\n(set-logic LIA)\n";
  for (const auto& c : consts) os << "(declare-const " << smt_symbol(c) << " Int)\n";
  for (const auto& c : consts) os << "(assert (>= " << smt_symbol(c) << " 0))\n";
  os << "(assert ";
  write(os, assertion);
  os << ")\n(check-sat)\n(get-model)\n";
  return os.str();
}

namespace {

struct ValidityProblem {
  std::vector<std::string> consts;
  Formula negated_body;
};

ValidityProblem validity_problem(const Formula& closed) {
  if (!closed.free_vars().empty())
    throw std::invalid_argument("validity check of a formula with free variable '" + *closed.free_vars().begin() + "'");
  Formula f = rename_apart(closed);
  if (f.kind() == Formula::Kind::Forall) return {f.bound_vars(), Formula::negate(f.body())};
  return {{}, Formula::negate(f)};
}

}  // namespace

std::string emit_validity_script(const Formula& closed, const std::vector<std::string>& comments) {
  auto p = validity_problem(closed);
  return emit_script(p.consts, p.negated_body, comments);
}

// Output parsing

namespace {

struct SExpr {
  std::string atom;  // empty for a list
  std::vector<SExpr> items;
  bool is_list = false;
};

class SExprReader {
public:
  explicit SExprReader(std::string_view text) : s_(text) {}

  std::optional<SExpr> next() {
    skip();
    if (i_ >= s_.size()) return std::nullopt;
    return read();
  }

private:
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
      else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else break;
    }
  }

  SExpr read() {
    SExpr e;
    if (s_[i_] == '(') {
      ++i_;
      e.is_list = true;
      for (;;) {
        skip();
        if (i_ >= s_.size()) throw std::runtime_error("unbalanced parentheses in solver output");
        if (s_[i_] == ')') {
          ++i_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (s_[i_] == ')') throw std::runtime_error("unexpected ')' in solver output");
    if (s_[i_] == '|') {
      auto end = s_.find('|', i_ + 1);
      if (end == std::string_view::npos) throw std::runtime_error("unterminated quoted symbol");
      e.atom = std::string(s_.substr(i_ + 1, end - i_ - 1));
      i_ = end + 1;
      return e;
    }
    if (s_[i_] == '"') {
      std::size_t j = i_ + 1;
      while (j < s_.size() && !(s_[j] == '"' && (j + 1 >= s_.size() || s_[j + 1] != '"'))) j += s_[j] == '"' ? 2 : 1;
      e.atom = std::string(s_.substr(i_, j + 1 - i_));
      i_ = std::min(j + 1, s_.size());
      return e;
    }
    std::size_t j = i_;
    while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) && s_[j] != '(' && s_[j] != ')') ++j;
    e.atom = std::string(s_.substr(i_, j - i_));
    i_ = j;
    return e;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::optional<std::int64_t> int_value(const SExpr& e) {
  auto atom_int = [](const std::string& a) -> std::optional<std::int64_t> {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
    if (ec != std::errc() || p != a.data() + a.size()) return std::nullopt;
    return v;
  };
  if (!e.is_list) return atom_int(e.atom);
  if (e.items.size() == 2 && !e.items[0].is_list && e.items[0].atom == "-") {
    auto v = int_value(e.items[1]);
    if (v) return -*v;
  }
  return std::nullopt;
}

void collect_bindings(const SExpr& e, std::map<std::string, std::int64_t>& out) {
  if (!e.is_list) return;
  if (e.items.size() == 5 && !e.items[0].is_list && e.items[0].atom == "define-fun" && e.items[2].is_list &&
      e.items[2].items.empty() && !e.items[3].is_list && e.items[3].atom == "Int") {
    if (auto v = int_value(e.items[4])) out[e.items[1].atom] = *v;
    return;
  }
  for (const auto& item : e.items) collect_bindings(item, out);
}

}  // namespace

SatResult parse_solver_output(const std::string& output, const std::vector<std::string>& consts) {
  SatResult r;
  r.output = output;
  std::istringstream lines(output);
  std::string first;
  while (std::getline(lines, first)) {
    auto b = first.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    first = first.substr(b, first.find_last_not_of(" \t\r") - b + 1);
    break;
  }
  if (first == "unsat") {
    r.answer = SatResult::Answer::Unsat;
    return r;
  }
  if (first == "unknown" || first == "timeout") {
    r.reason = first == "timeout" ? UnknownReason::Timeout : UnknownReason::SolverUnknown;
    return r;
  }
  if (first != "sat") {
    r.reason = UnknownReason::ProcessError;
    return r;
  }
  std::map<std::string, std::int64_t> bindings;
  try {
    auto rest = output.substr(output.find("sat") + 3);
    SExprReader reader(rest);
    while (auto e = reader.next()) collect_bindings(*e, bindings);
  } catch (const std::runtime_error&) {
    r.reason = UnknownReason::ProcessError;
    return r;
  }
  for (const auto& c : consts) {
    auto it = bindings.find(c);
    if (it == bindings.end() || it->second < 0) {
      // The solver may omit irrelevant constants; any natural works, pick 0.
      if (it == bindings.end()) {
        r.model[c] = 0;
        continue;
      }
      r.reason = UnknownReason::ProcessError;
      return r;
    }
    r.model[c] = static_cast<std::uint64_t>(it->second);
  }
  r.answer = SatResult::Answer::Sat;
  return r;
}

SatResult run_script(const std::string& script, const std::vector<std::string>& consts, const SolverConfig& config,
                     const std::string& script_name) {
  if (config.emit_dir && !script_name.empty()) {
    std::filesystem::create_directories(*config.emit_dir);
    std::ofstream(std::filesystem::path(*config.emit_dir) / (script_name + ".smt2"), std::ios::binary) << script;
  }
  SatResult r;
  if (config.command.empty()) {
    r.reason = UnknownReason::ProcessError;
    r.output = "no solver command configured";
    return r;
  }
  auto proc = run_process(config.command, script, config.timeout_ms);
  if (proc.timed_out) {
    r.reason = UnknownReason::Timeout;
    r.output = proc.output;
    return r;
  }
  if (proc.spawn_failed) {
    r.reason = UnknownReason::ProcessError;
    r.output = "could not run solver command: " + config.command;
    return r;
  }
  return parse_solver_output(proc.output, consts);
}

namespace {

std::uint64_t coordinate_sum(const Assignment& m) {
  std::uint64_t s = 0;
  for (const auto& [k, v] : m) s += v;
  return s;
}

LinearTerm sum_term(const std::vector<std::string>& vars) {
  LinearTerm t;
  for (const auto& v : vars) t += LinearTerm::var(v);
  return t;
}

// Shrinks a model by bisection on the sum of the constants.
Assignment minimize_model(const std::vector<std::string>& consts, const Formula& assertion, Assignment model,
                          const SolverConfig& config, const std::string& name) {
  if (consts.empty()) return model;
  std::uint64_t lo = 0, hi = coordinate_sum(model);
  const LinearTerm total = sum_term(consts);
  int round = 0;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    Formula bounded = Formula::conj({assertion, le(total, static_cast<std::int64_t>(mid))});
    auto r = run_script(emit_script(consts, bounded, {name + " minimization, sum <= " + std::to_string(mid)}), consts,
                        config, name.empty() ? "" : name + ".min" + std::to_string(++round));
    if (r.answer == SatResult::Answer::Sat) {
      model = r.model;
      hi = std::min<std::uint64_t>(mid, coordinate_sum(model));
    } else if (r.answer == SatResult::Answer::Unsat) {
      lo = mid + 1;
    } else {
      break;
    }
  }
  return model;
}

}  // namespace

SolverVerdict check_validity(const Formula& closed, const SolverConfig& config, const std::string& name) {
  auto start = std::chrono::steady_clock::now();
  auto problem = validity_problem(closed);
  SolverVerdict v;
  auto r = run_script(emit_script(problem.consts, problem.negated_body, {name}), problem.consts, config, name);
  switch (r.answer) {
    case SatResult::Answer::Unsat: v.status = SolverVerdict::Status::Valid; break;
    case SatResult::Answer::Sat:
      v.status = SolverVerdict::Status::Invalid;
      v.countermodel = config.minimize ? minimize_model(problem.consts, problem.negated_body, r.model, config, name)
                                       : r.model;
      break;
    case SatResult::Answer::Unknown:
      v.status = SolverVerdict::Status::Unknown;
      v.reason = r.reason;
      v.detail = r.output;
      break;
  }
  v.wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return v;
}

SatResult check_satisfiable(const Formula& f, const SolverConfig& config, const std::string& name) {
  Formula g = rename_apart(f);
  auto fv = g.free_vars();
  std::vector<std::string> consts(fv.begin(), fv.end());
  return run_script(emit_script(consts, g, {name}), consts, config, name);
}

}  // namespace polyabs
