#include "polyabs/rule.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace polyabs {

RuleError::RuleError(const std::string& file_, std::size_t line_, std::size_t column_, const std::string& message)
    : std::runtime_error(file_ + ":" + std::to_string(line_) + ":" + std::to_string(column_) + ": " + message),
      file(file_),
      line(line_),
      column(column_) {}

namespace {

bool is_identifier(const std::string& s) {
  static const std::regex re("[A-Za-z_][A-Za-z0-9_]*");
  return std::regex_match(s, re);
}

struct Word {
  std::string text;
  std::size_t column;
};

std::vector<Word> split_words(const std::string& line) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), i + 1});
    i = j;
  }
  return out;
}

struct PendingTransition {
  std::string name;
  Label label;
  std::map<std::string, Tokens> pre, post;
  std::size_t line = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuleError(path.string(), 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PetriNet parse_net(std::string_view text, const std::string& file) {
  std::vector<std::string> place_order;
  std::set<std::string> known_places;
  std::vector<PendingTransition> transitions;
  std::set<std::string> transition_names;
  std::set<std::string> declared_places;

  auto note_place = [&](const std::string& p) {
    if (known_places.insert(p).second) place_order.push_back(p);
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    // ':' and '->' are separate tokens even without surrounding blanks.
    std::string line;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw.compare(i, 2, "->") == 0) {
        line += " -> ";
        ++i;
      } else if (raw[i] == ':') {
        line += " : ";
      } else {
        line += raw[i];
      }
    }
    auto words = split_words(line);
    if (words.empty()) continue;
    // Columns refer to the rewritten line; good enough for diagnostics.
    auto fail = [&](std::size_t col, const std::string& msg) -> RuleError { return RuleError(file, lineno, col, msg); };
    const std::string& kw = words[0].text;

    if (kw == "net") continue;
    if (kw == "pl") {
      if (words.size() < 2 || !is_identifier(words[1].text)) throw fail(words[0].column, "expected a place name after 'pl'");
      if (words.size() > 3) throw fail(words[3].column, "unexpected text after place declaration");
      if (words.size() == 3) {
        static const std::regex tokens(R"(\(\d+\))");
        if (!std::regex_match(words[2].text, tokens)) throw fail(words[2].column, "expected '(<tokens>)'");
      }
      if (!declared_places.insert(words[1].text).second)
        throw fail(words[1].column, "duplicate place '" + words[1].text + "'");
      note_place(words[1].text);
      continue;
    }
    if (kw != "tr") throw fail(words[0].column, "expected 'pl', 'tr' or 'net'");

    if (words.size() < 2 || !is_identifier(words[1].text)) throw fail(words[0].column, "expected a transition name after 'tr'");
    PendingTransition t;
    t.name = words[1].text;
    t.line = lineno;
    if (!transition_names.insert(t.name).second) throw fail(words[1].column, "duplicate transition '" + t.name + "'");
    std::size_t i = 2;
    if (i < words.size() && words[i].text == ":") {
      if (i + 1 >= words.size() || !is_identifier(words[i + 1].text)) throw fail(words[i].column, "expected a label after ':'");
      const auto& lab = words[i + 1].text;
      t.label = lab == "tau" ? Label::silent() : Label::observable(lab);
      i += 2;
    } else {
      if (t.name == "tau") throw fail(words[1].column, "transition 'tau' needs an explicit label; use ': tau' for a silent one");
      t.label = Label::observable(t.name);
    }
    bool after_arrow = false;
    bool saw_arrow = false;
    static const std::regex arc(R"(([A-Za-z_][A-Za-z0-9_]*)(\*(\d+))?)");
    for (; i < words.size(); ++i) {
      const auto& w = words[i];
      if (w.text == "->") {
        if (saw_arrow) throw fail(w.column, "second '->' in transition");
        saw_arrow = after_arrow = true;
        continue;
      }
      std::smatch m;
      if (!std::regex_match(w.text, m, arc)) {
        if (w.text.front() == '[' || w.text.front() == ']')
          throw fail(w.column, "time intervals are not supported");
        throw fail(w.column, "malformed arc '" + w.text + "'");
      }
      Tokens weight = 1;
      if (m[3].matched) {
        try {
          weight = std::stoull(m[3].str());
        } catch (const std::out_of_range&) {
          throw fail(w.column, "arc weight out of range");
        }
      }
      auto& side = after_arrow ? t.post : t.pre;
      side[m[1].str()] += weight;
      note_place(m[1].str());
    }
    if (!saw_arrow) throw fail(words[0].column, "transition without '->'");
    transitions.push_back(std::move(t));
  }

  for (const auto& t : transitions)
    if (known_places.count(t.name)) throw RuleError(file, t.line, 1, "'" + t.name + "' names both a place and a transition");

  PetriNet net;
  try {
    for (const auto& p : place_order) net.add_place(p);
    for (auto& t : transitions) net.add_transition(t.name, t.label, t.pre, t.post);
  } catch (const std::invalid_argument& e) {
    throw RuleError(file, 0, 0, e.what());
  }
  return net;
}

namespace {

bool ends_with_operator(const std::string& s) {
  static const std::regex re(R"((^|.*[\s()])(and|or|not)\s*$|.*(=>|<=>|<=|>=|=|<|>|\+|-|\*|\(|\.)\s*$)");
  return std::regex_match(s, re);
}

bool starts_with_operator(const std::string& s) {
  static const std::regex re(R"(\s*((and|or)(\s|\(|$)|=>|<=>|<=|>=|=|<|>|\+|-|\*|\)).*)");
  return std::regex_match(s, re);
}

std::string strip_comment(std::string s) {
  if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

}  // namespace

EquivalenceSpec parse_equivalence(std::string_view text, const std::string& file) {
  struct Entry {
    std::string key;
    std::size_t first_line;
    std::string body;
  };
  std::vector<Entry> entries;
  static const std::regex key_re(R"(\s*(C1|C2|E)\s*:(.*))");

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    std::smatch m;
    if (std::regex_match(line, m, key_re)) {
      // Blank out the key so parser columns match the file.
      std::string body = std::string(static_cast<std::size_t>(m.position(2)), ' ') + m[2].str();
      entries.push_back({m[1].str(), lineno, body});
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (!entries.empty()) entries.back().body += "\n";
      continue;
    }
    if (entries.empty()) throw RuleError(file, lineno, 1, "expected 'C1:', 'C2:' or 'E:'");
    auto& body = entries.back().body;
    std::string previous = strip_comment(body);
    if (auto nl = previous.rfind('\n'); nl != std::string::npos) previous.erase(0, nl + 1);
    bool glue = previous.find_first_not_of(" \t\r\n") == std::string::npos || ends_with_operator(previous) ||
                starts_with_operator(line);
    body += glue ? "\n" : " and\n";
    body += line;
  }

  EquivalenceSpec spec;
  bool have[3] = {false, false, false};
  for (const auto& e : entries) {
    int idx = e.key == "C1" ? 0 : e.key == "C2" ? 1 : 2;
    if (have[idx]) throw RuleError(file, e.first_line, 1, "duplicate entry '" + e.key + ":'");
    have[idx] = true;
    Formula f;
    try {
      f = parse_formula(e.body, e.first_line - 1);
    } catch (const ParseError& pe) {
      std::string what = pe.what();
      throw RuleError(file, pe.line, pe.column, what.substr(what.find(": ") + 2));
    }
    (idx == 0 ? spec.c1 : idx == 1 ? spec.c2 : spec.e) = f;
  }
  if (!have[2]) throw RuleError(file, lineno, 1, "missing 'E:' entry");
  return spec;
}

void ReductionRule::validate() {
  auto check_scope = [&](const Formula& f, const std::string& what, const std::vector<const PetriNet*>& nets) {
    for (const auto& v : f.free_vars()) {
      bool found = std::any_of(nets.begin(), nets.end(), [&](const PetriNet* n) { return n->find_place(v).has_value(); });
      if (!found) throw RuleError(name, 0, 0, what + " mentions unknown place '" + v + "'");
    }
  };
  check_scope(c1, "C1", {&initial});
  check_scope(c2, "C2", {&reduced});
  check_scope(e, "E", {&initial, &reduced});
  alphabet = Alphabet::of(initial, reduced);
}

ReductionRule load_rule(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path root(dir);
  if (!fs::is_directory(root)) throw RuleError(dir, 0, 0, "not a rule directory");
  ReductionRule rule;
  rule.name = root.filename().empty() ? root.parent_path().filename().string() : root.filename().string();
  auto net_path = [&](const char* f) { return (root / f).string(); };
  rule.initial = parse_net(read_file(root / "initial.net"), net_path("initial.net"));
  rule.reduced = parse_net(read_file(root / "reduced.net"), net_path("reduced.net"));
  auto spec = parse_equivalence(read_file(root / "rule.eq"), net_path("rule.eq"));
  rule.c1 = spec.c1;
  rule.c2 = spec.c2;
  rule.e = spec.e;
  if (fs::exists(root / "initial.cert")) rule.initial_cert_path = net_path("initial.cert");
  if (fs::exists(root / "reduced.cert")) rule.reduced_cert_path = net_path("reduced.cert");
  rule.validate();
  return rule;
}

}  // namespace polyabs
