#include "polyabs/petri_net.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace polyabs {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in vector arithmetic");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in vector arithmetic");
  return r;
}

std::int64_t to_signed(Tokens t) {
  if (t > static_cast<Tokens>(INT64_MAX)) throw std::overflow_error("arc weight exceeds signed 64-bit range");
  return static_cast<std::int64_t>(t);
}

}  // namespace

Label Label::observable(std::string symbol) {
  if (symbol.empty()) throw std::invalid_argument("observable label needs a non-empty symbol");
  Label l;
  l.symbol_ = std::move(symbol);
  return l;
}

bool Marking::covers(const Marking& other) const {
  if (other.size() != size()) throw std::invalid_argument("marking size mismatch");
  for (std::size_t i = 0; i < size(); ++i)
    if (tokens_[i] < other.tokens_[i]) return false;
  return true;
}

bool IntVector::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](std::int64_t v) { return v == 0; });
}

std::size_t PetriNet::add_place(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty place name");
  if (find_place(name) || find_transition(name))
    throw std::invalid_argument("duplicate identifier '" + name + "'");
  places_.push_back(std::move(name));
  for (auto& t : transitions_) {
    t.pre.push_back(0);
    t.post.push_back(0);
  }
  return places_.size() - 1;
}

TransitionId PetriNet::add_transition(std::string name, Label label,
                                      const std::map<std::string, Tokens>& pre,
                                      const std::map<std::string, Tokens>& post) {
  if (name.empty()) throw std::invalid_argument("empty transition name");
  if (find_place(name) || find_transition(name))
    throw std::invalid_argument("duplicate identifier '" + name + "'");
  Transition t{std::move(name), std::move(label), std::vector<Tokens>(places_.size(), 0),
               std::vector<Tokens>(places_.size(), 0)};
  for (const auto& [place, w] : pre) t.pre[place_index(place)] += w;
  for (const auto& [place, w] : post) t.post[place_index(place)] += w;
  transitions_.push_back(std::move(t));
  return transitions_.size() - 1;
}

const Transition& PetriNet::transition(TransitionId t) const {
  if (t >= transitions_.size()) throw std::out_of_range("unknown transition id " + std::to_string(t));
  return transitions_[t];
}

std::optional<std::size_t> PetriNet::find_place(std::string_view name) const {
  auto it = std::find(places_.begin(), places_.end(), name);
  if (it == places_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - places_.begin());
}

std::optional<TransitionId> PetriNet::find_transition(std::string_view name) const {
  for (std::size_t i = 0; i < transitions_.size(); ++i)
    if (transitions_[i].name == name) return i;
  return std::nullopt;
}

std::size_t PetriNet::place_index(std::string_view name) const {
  if (auto p = find_place(name)) return *p;
  throw std::out_of_range("unknown place '" + std::string(name) + "'");
}

TransitionId PetriNet::transition_index(std::string_view name) const {
  if (auto t = find_transition(name)) return *t;
  throw std::out_of_range("unknown transition '" + std::string(name) + "'");
}

bool PetriNet::has_silent_transitions() const {
  return std::any_of(transitions_.begin(), transitions_.end(),
                     [](const Transition& t) { return t.label.is_silent(); });
}

std::vector<std::string> PetriNet::alphabet() const {
  std::vector<std::string> out;
  for (const auto& t : transitions_)
    if (!t.label.is_silent() && std::find(out.begin(), out.end(), t.label.symbol()) == out.end())
      out.push_back(t.label.symbol());
  return out;
}

Marking PetriNet::marking(const std::map<std::string, Tokens>& tokens) const {
  Marking m = zero_marking();
  for (const auto& [place, n] : tokens) m[place_index(place)] = n;
  return m;
}

std::string PetriNet::format(const Marking& m) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < places_.size(); ++i) {
    if (i) os << ", ";
    os << places_[i] << ": " << m[i];
  }
  os << ')';
  return os.str();
}

std::optional<Marking> fire(const PetriNet& net, const Marking& m, TransitionId id) {
  const Transition& t = net.transition(id);
  if (m.size() != net.place_count()) throw std::invalid_argument("marking does not match the net's places");
  for (std::size_t p = 0; p < m.size(); ++p)
    if (m[p] < t.pre[p]) return std::nullopt;
  Marking next = m;
  for (std::size_t p = 0; p < m.size(); ++p) {
    Tokens v = m[p] - t.pre[p];
    if (__builtin_add_overflow(v, t.post[p], &next[p])) throw std::overflow_error("token count overflow");
  }
  return next;
}

std::optional<Marking> fire_sequence(const PetriNet& net, const Marking& m, const FiringSequence& sequence) {
  std::optional<Marking> current = m;
  for (TransitionId t : sequence) {
    current = fire(net, *current, t);
    if (!current) return std::nullopt;
  }
  return current;
}

HurdleDelta compose(const HurdleDelta& first, const HurdleDelta& second) {
  const std::size_t n = first.hurdle.size();
  HurdleDelta out{IntVector(n), IntVector(n)};
  for (std::size_t p = 0; p < n; ++p) {
    out.hurdle[p] = std::max(first.hurdle[p], checked_add(second.hurdle[p], -first.delta[p]));
    out.delta[p] = checked_add(first.delta[p], second.delta[p]);
  }
  return out;
}

HurdleDelta hurdle_delta(const PetriNet& net, const FiringSequence& sequence) {
  const std::size_t n = net.place_count();
  HurdleDelta acc{IntVector(n), IntVector(n)};
  for (TransitionId id : sequence) {
    const Transition& t = net.transition(id);
    HurdleDelta step{IntVector(n), IntVector(n)};
    for (std::size_t p = 0; p < n; ++p) {
      step.hurdle[p] = to_signed(t.pre[p]);
      step.delta[p] = checked_add(to_signed(t.post[p]), -to_signed(t.pre[p]));
    }
    acc = compose(acc, step);
  }
  return acc;
}

HurdleDelta accelerate(const HurdleDelta& once, std::uint64_t k) {
  const std::size_t n = once.hurdle.size();
  HurdleDelta out{IntVector(n), IntVector(n)};
  if (k == 0) return out;
  const auto kk = static_cast<std::int64_t>(k);
  const IntVector consumed = positive_part(IntVector([&] {
    std::vector<std::int64_t> neg(n);
    for (std::size_t p = 0; p < n; ++p) neg[p] = -once.delta[p];
    return neg;
  }()));
  for (std::size_t p = 0; p < n; ++p) {
    out.hurdle[p] = checked_add(once.hurdle[p], checked_mul(kk - 1, consumed[p]));
    out.delta[p] = checked_mul(kk, once.delta[p]);
  }
  return out;
}

IntVector positive_part(const IntVector& v) {
  IntVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max<std::int64_t>(0, v[i]);
  return out;
}

namespace {

std::map<std::string, Tokens> arcs(const PetriNet& net, const std::vector<Tokens>& weights) {
  std::map<std::string, Tokens> out;
  for (std::size_t p = 0; p < weights.size(); ++p)
    if (weights[p] != 0) out[net.places()[p]] = weights[p];
  return out;
}

PetriNet copy_places(const PetriNet& net) {
  PetriNet out;
  for (const auto& p : net.places()) out.add_place(p);
  return out;
}

std::string fresh_transition_name(const PetriNet& net, std::string base) {
  while (net.find_transition(base) || net.find_place(base)) base += '\'';
  return base;
}

}  // namespace

RemovalResult t_minus(const PetriNet& net, std::string_view symbol) {
  RemovalResult result{copy_places(net), false};
  for (const auto& t : net.transitions()) {
    if (!t.label.is_silent() && t.label.symbol() == symbol) {
      result.symbol_found = true;
      continue;
    }
    result.net.add_transition(t.name, t.label, arcs(net, t.pre), arcs(net, t.post));
  }
  return result;
}

PetriNet t_plus(const PetriNet& net, std::string_view from, std::string_view to) {
  PetriNet out = copy_places(net);
  for (const auto& t : net.transitions()) out.add_transition(t.name, t.label, arcs(net, t.pre), arcs(net, t.post));
  for (const auto& t : net.transitions()) {
    if (t.label.is_silent() || t.label.symbol() != from) continue;
    out.add_transition(fresh_transition_name(out, t.name + "'"), Label::observable(std::string(to)),
                       arcs(net, t.pre), arcs(net, t.post));
  }
  return out;
}

PetriNet relabel(const PetriNet& net, std::string_view symbol, const Label& replacement) {
  PetriNet out = copy_places(net);
  for (const auto& t : net.transitions()) {
    bool hit = !t.label.is_silent() && t.label.symbol() == symbol;
    out.add_transition(t.name, hit ? replacement : t.label, arcs(net, t.pre), arcs(net, t.post));
  }
  return out;
}

PetriNet sync_product(const PetriNet& left, const PetriNet& right) {
  PetriNet out = copy_places(left);
  for (const auto& p : right.places()) {
    if (left.find_place(p)) throw std::invalid_argument("synchronous product needs disjoint places; '" + p + "' is shared");
    out.add_place(p);
  }
  auto left_alpha = left.alphabet();
  auto right_alpha = right.alphabet();
  auto shared = [&](const Label& l) {
    return !l.is_silent() &&
           std::find(left_alpha.begin(), left_alpha.end(), l.symbol()) != left_alpha.end() &&
           std::find(right_alpha.begin(), right_alpha.end(), l.symbol()) != right_alpha.end();
  };
  auto add_sum = [&](std::string name, const Label& label, std::map<std::string, Tokens> pre,
                     std::map<std::string, Tokens> post, const std::map<std::string, Tokens>& pre2,
                     const std::map<std::string, Tokens>& post2) {
    pre.insert(pre2.begin(), pre2.end());
    post.insert(post2.begin(), post2.end());
    out.add_transition(fresh_transition_name(out, std::move(name)), label, pre, post);
  };
  for (const auto& t : left.transitions())
    if (!shared(t.label)) add_sum(t.name, t.label, arcs(left, t.pre), arcs(left, t.post), {}, {});
  for (const auto& t : right.transitions())
    if (!shared(t.label)) add_sum(t.name, t.label, arcs(right, t.pre), arcs(right, t.post), {}, {});
  for (const auto& t1 : left.transitions()) {
    if (!shared(t1.label)) continue;
    for (const auto& t2 : right.transitions()) {
      if (t2.label != t1.label) continue;
      add_sum(t1.name + "|" + t2.name, t1.label, arcs(left, t1.pre), arcs(left, t1.post), arcs(right, t2.pre),
              arcs(right, t2.post));
    }
  }
  return out;
}

PetriNet rename_places(const PetriNet& net, const std::map<std::string, std::string>& renaming) {
  auto renamed = [&](const std::string& p) {
    auto it = renaming.find(p);
    return it == renaming.end() ? p : it->second;
  };
  PetriNet out;
  for (const auto& p : net.places()) out.add_place(renamed(p));
  for (const auto& t : net.transitions()) {
    std::map<std::string, Tokens> pre, post;
    for (const auto& [p, w] : arcs(net, t.pre)) pre[renamed(p)] = w;
    for (const auto& [p, w] : arcs(net, t.post)) post[renamed(p)] = w;
    out.add_transition(t.name, t.label, pre, post);
  }
  return out;
}

bool structurally_equal(const PetriNet& a, const PetriNet& b) {
  auto sorted_places = [](const PetriNet& n) {
    auto v = n.places();
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted_places(a) != sorted_places(b)) return false;
  using Shape = std::tuple<Label, std::map<std::string, Tokens>, std::map<std::string, Tokens>>;
  auto shapes = [](const PetriNet& n) {
    std::vector<Shape> v;
    for (const auto& t : n.transitions()) v.emplace_back(t.label, arcs(n, t.pre), arcs(n, t.post));
    std::sort(v.begin(), v.end());
    return v;
  };
  return shapes(a) == shapes(b);
}

}  // namespace polyabs
