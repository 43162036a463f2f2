#include "polyabs/presburger.hpp"

#include <algorithm>
#include <sstream>

namespace polyabs {

namespace {

std::int64_t add_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("coefficient overflow");
  return r;
}

std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("coefficient overflow");
  return r;
}

}  // namespace

// ---------------------------------------------------------------- LinearTerm

LinearTerm LinearTerm::var(std::string name, std::int64_t coefficient) {
  LinearTerm t;
  if (coefficient != 0) t.coeffs_.emplace(std::move(name), coefficient);
  return t;
}

LinearTerm& LinearTerm::operator+=(const LinearTerm& other) {
  constant_ = add_checked(constant_, other.constant_);
  for (const auto& [v, c] : other.coeffs_) {
    auto& slot = coeffs_[v];
    slot = add_checked(slot, c);
    if (slot == 0) coeffs_.erase(v);
  }
  return *this;
}

LinearTerm& LinearTerm::operator-=(const LinearTerm& other) { return *this += other.scaled(-1); }

LinearTerm LinearTerm::scaled(std::int64_t factor) const {
  LinearTerm out;
  if (factor == 0) return out;
  out.constant_ = mul_checked(constant_, factor);
  for (const auto& [v, c] : coeffs_) out.coeffs_.emplace(v, mul_checked(c, factor));
  return out;
}

LinearTerm LinearTerm::substitute(const std::map<std::string, LinearTerm>& map) const {
  LinearTerm out(constant_);
  for (const auto& [v, c] : coeffs_) {
    auto it = map.find(v);
    out += it == map.end() ? var(v, c) : it->second.scaled(c);
  }
  return out;
}

std::string LinearTerm::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coeffs_) {
    std::int64_t mag = c < 0 ? -c : c;
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (mag != 1) os << mag << '*';
    os << v;
    first = false;
  }
  if (first) {
    os << constant_;
  } else if (constant_ != 0) {
    os << (constant_ < 0 ? " - " : " + ") << (constant_ < 0 ? -constant_ : constant_);
  }
  return os.str();
}

// ------------------------------------------------------------------- Formula

struct Formula::Node {
  Kind kind = Kind::True;
  Relation rel = Relation::Eq;
  LinearTerm lhs, rhs;
  std::vector<Formula> kids;
  std::vector<std::string> vars;
  std::set<std::string> fv;
  bool quantified = false;
};

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::True;
    return std::shared_ptr<const Node>(n);
  }();
  return Formula(node);
}

Formula Formula::bottom() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::False;
    return std::shared_ptr<const Node>(n);
  }();
  return Formula(node);
}

Formula Formula::compare(LinearTerm lhs, Relation rel, LinearTerm rhs) {
  LinearTerm diff = lhs - rhs;
  if (diff.is_constant()) {
    std::int64_t d = diff.constant();
    bool v = false;
    switch (rel) {
      case Relation::Eq: v = d == 0; break;
      case Relation::Le: v = d <= 0; break;
      case Relation::Lt: v = d < 0; break;
      case Relation::Ge: v = d >= 0; break;
      case Relation::Gt: v = d > 0; break;
    }
    return v ? top() : bottom();
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compare;
  n->rel = rel;
  for (const auto& [v, c] : lhs.coefficients()) n->fv.insert(v);
  for (const auto& [v, c] : rhs.coefficients()) n->fv.insert(v);
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(std::move(n));
}

Formula Formula::negate(Formula f) {
  if (f.is_true()) return bottom();
  if (f.is_false()) return top();
  if (f.kind() == Kind::Not) return f.node_->kids[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->fv = f.node_->fv;
  n->quantified = f.node_->quantified;
  n->kids.push_back(std::move(f));
  return Formula(std::move(n));
}

Formula Formula::conj(std::vector<Formula> parts) {
  std::vector<Formula> flat;
  for (auto& p : parts) {
    if (p.is_true()) continue;
    if (p.is_false()) return bottom();
    if (p.kind() == Kind::And) {
      for (const auto& c : p.children()) flat.push_back(c);
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return top();
  if (flat.size() == 1) return flat.front();
  parts = std::move(flat);
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  for (const auto& p : parts) {
    n->fv.insert(p.node_->fv.begin(), p.node_->fv.end());
    n->quantified = n->quantified || p.node_->quantified;
  }
  n->kids = std::move(parts);
  return Formula(std::move(n));
}

Formula Formula::disj(std::vector<Formula> parts) {
  std::vector<Formula> flat;
  for (auto& p : parts) {
    if (p.is_false()) continue;
    if (p.is_true()) return top();
    if (p.kind() == Kind::Or) {
      for (const auto& c : p.children()) flat.push_back(c);
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return bottom();
  if (flat.size() == 1) return flat.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  for (const auto& p : flat) {
    n->fv.insert(p.node_->fv.begin(), p.node_->fv.end());
    n->quantified = n->quantified || p.node_->quantified;
  }
  n->kids = std::move(flat);
  return Formula(std::move(n));
}

Formula Formula::implies(Formula premise, Formula conclusion) {
  if (premise.is_false() || conclusion.is_true()) return top();
  if (premise.is_true()) return conclusion;
  if (conclusion.is_false()) return negate(std::move(premise));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Implies;
  n->fv = premise.node_->fv;
  n->fv.insert(conclusion.node_->fv.begin(), conclusion.node_->fv.end());
  n->quantified = premise.node_->quantified || conclusion.node_->quantified;
  n->kids = {std::move(premise), std::move(conclusion)};
  return Formula(std::move(n));
}

Formula Formula::iff(Formula a, Formula b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  if (a.is_false()) return negate(std::move(b));
  if (b.is_false()) return negate(std::move(a));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Iff;
  n->fv = a.node_->fv;
  n->fv.insert(b.node_->fv.begin(), b.node_->fv.end());
  n->quantified = a.node_->quantified || b.node_->quantified;
  n->kids = {std::move(a), std::move(b)};
  return Formula(std::move(n));
}

Formula Formula::exists(std::vector<std::string> vars, Formula body) {
  return quantifier(Kind::Exists, std::move(vars), std::move(body));
}

Formula Formula::forall(std::vector<std::string> vars, Formula body) {
  return quantifier(Kind::Forall, std::move(vars), std::move(body));
}

Formula::Kind Formula::kind() const { return node_->kind; }
Relation Formula::relation() const { return node_->rel; }
const LinearTerm& Formula::lhs() const { return node_->lhs; }
const LinearTerm& Formula::rhs() const { return node_->rhs; }
std::span<const Formula> Formula::children() const { return node_->kids; }
const std::vector<std::string>& Formula::bound_vars() const { return node_->vars; }
const Formula& Formula::body() const { return node_->kids.at(0); }
std::set<std::string> Formula::free_vars() const { return node_->fv; }
bool Formula::has_quantifiers() const { return node_->quantified; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Compare: return x.rel == y.rel && x.lhs == y.lhs && x.rhs == y.rhs;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (x.vars != y.vars) return false;
      [[fallthrough]];
    default: return x.kids == y.kids;
  }
}

Formula Formula::quantifier(Kind kind, std::vector<std::string> vars, Formula body) {
  if (body.is_true() || body.is_false()) return body;
  auto fv = body.free_vars();
  std::vector<std::string> kept;
  for (auto& v : vars)
    if (fv.count(v) && std::find(kept.begin(), kept.end(), v) == kept.end()) kept.push_back(std::move(v));
  if (kept.empty()) return body;
  if (body.kind() == kind) {
    // Merge directly nested binders of the same kind. Inner binders shadow,
    // so outer names still free in the inner body are disjoint from them.
    for (const auto& v : body.bound_vars()) kept.push_back(v);
    return quantifier(kind, std::move(kept), body.body());
  }
  auto n = std::make_shared<Formula::Node>();
  n->kind = kind;
  n->fv = std::move(fv);
  for (const auto& v : kept) n->fv.erase(v);
  n->quantified = true;
  n->vars = std::move(kept);
  n->kids.push_back(std::move(body));
  return Formula(std::move(n));
}

namespace {

const char* relation_text(Relation r) {
  switch (r) {
    case Relation::Eq: return "=";
    case Relation::Le: return "<=";
    case Relation::Lt: return "<";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
  }
  return "?";
}

void print(std::ostream& os, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: os << "true"; return;
    case K::False: os << "false"; return;
    case K::Compare: os << f.lhs().to_string() << ' ' << relation_text(f.relation()) << ' ' << f.rhs().to_string(); return;
    case K::Not:
      os << "not (";
      print(os, f.children()[0]);
      os << ')';
      return;
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff: {
      const char* op = f.kind() == K::And ? " and " : f.kind() == K::Or ? " or " : f.kind() == K::Implies ? " => " : " <=> ";
      os << '(';
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) os << op;
        print(os, c);
        first = false;
      }
      os << ')';
      return;
    }
    case K::Exists:
    case K::Forall:
      os << '(' << (f.kind() == K::Exists ? "exists" : "forall");
      for (const auto& v : f.bound_vars()) os << ' ' << v;
      os << ". ";
      print(os, f.body());
      os << ')';
      return;
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::ostringstream os;
  print(os, *this);
  return os.str();
}

Formula eq(LinearTerm a, LinearTerm b) { return Formula::compare(std::move(a), Relation::Eq, std::move(b)); }
Formula le(LinearTerm a, LinearTerm b) { return Formula::compare(std::move(a), Relation::Le, std::move(b)); }
Formula lt(LinearTerm a, LinearTerm b) { return Formula::compare(std::move(a), Relation::Lt, std::move(b)); }
Formula ge(LinearTerm a, LinearTerm b) { return Formula::compare(std::move(a), Relation::Ge, std::move(b)); }
Formula gt(LinearTerm a, LinearTerm b) { return Formula::compare(std::move(a), Relation::Gt, std::move(b)); }

// ---------------------------------------------------------------- evaluation

namespace {

__extension__ typedef __int128 Wide;

struct EvalContext {
  std::optional<std::uint64_t> bound;
  bool strict;  // missing variables are errors rather than ranging over the bound
};

std::optional<bool> peval(const Formula& f, Assignment& a, const EvalContext& ctx);

bool search(const Formula& f, const std::vector<std::string>& vars, std::size_t index, Assignment& a,
            std::uint64_t bound, const std::function<bool(const Assignment&)>& on_model);

std::optional<bool> eval_compare(const Formula& f, const Assignment& a, const EvalContext& ctx) {
  Wide lo = 0, hi = 0;
  auto accumulate = [&](const LinearTerm& t, int sign) {
    lo += static_cast<Wide>(t.constant()) * sign;
    hi += static_cast<Wide>(t.constant()) * sign;
    for (const auto& [v, c] : t.coefficients()) {
      Wide coeff = static_cast<Wide>(c) * sign;
      auto it = a.find(v);
      if (it != a.end()) {
        Wide term = coeff * static_cast<Wide>(it->second);
        lo += term;
        hi += term;
      } else if (ctx.strict) {
        throw UnassignedVariable(v);
      } else {
        Wide span = coeff * static_cast<Wide>(ctx.bound.value_or(0));
        (coeff > 0 ? hi : lo) += span;
      }
    }
  };
  accumulate(f.lhs(), 1);
  accumulate(f.rhs(), -1);
  // Range [lo, hi] of lhs - rhs.
  switch (f.relation()) {
    case Relation::Eq:
      if (lo > 0 || hi < 0) return false;
      if (lo == 0 && hi == 0) return true;
      return std::nullopt;
    case Relation::Le:
      if (hi <= 0) return true;
      if (lo > 0) return false;
      return std::nullopt;
    case Relation::Lt:
      if (hi < 0) return true;
      if (lo >= 0) return false;
      return std::nullopt;
    case Relation::Ge:
      if (lo >= 0) return true;
      if (hi < 0) return false;
      return std::nullopt;
    case Relation::Gt:
      if (lo > 0) return true;
      if (hi <= 0) return false;
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<bool> eval_quantifier(const Formula& f, Assignment& a, const EvalContext& ctx) {
  if (!ctx.strict) {
    for (const auto& v : f.free_vars())
      if (!a.count(v)) return std::nullopt;
  }
  if (!ctx.bound) throw UnboundedQuantifier("quantifier over " + f.bound_vars().front() + " needs an enumeration bound");
  Assignment inner = a;
  for (const auto& v : f.bound_vars()) inner.erase(v);
  const bool is_exists = f.kind() == Formula::Kind::Exists;
  Formula target = is_exists ? f.body() : Formula::negate(f.body());
  bool found = false;
  search(target, f.bound_vars(), 0, inner, *ctx.bound, [&](const Assignment&) {
    found = true;
    return false;
  });
  return is_exists ? found : !found;
}

std::optional<bool> peval(const Formula& f, Assignment& a, const EvalContext& ctx) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Compare: return eval_compare(f, a, ctx);
    case K::Not: {
      auto v = peval(f.children()[0], a, ctx);
      if (!v) return std::nullopt;
      return !*v;
    }
    case K::And: {
      bool unknown = false;
      for (const auto& c : f.children()) {
        auto v = peval(c, a, ctx);
        if (!v) unknown = true;
        else if (!*v) return false;
      }
      if (unknown) return std::nullopt;
      return true;
    }
    case K::Or: {
      bool unknown = false;
      for (const auto& c : f.children()) {
        auto v = peval(c, a, ctx);
        if (!v) unknown = true;
        else if (*v) return true;
      }
      if (unknown) return std::nullopt;
      return false;
    }
    case K::Implies: {
      auto p = peval(f.children()[0], a, ctx);
      if (p && !*p) return true;
      auto q = peval(f.children()[1], a, ctx);
      if (q && *q) return true;
      if (p && q) return false;
      return std::nullopt;
    }
    case K::Iff: {
      auto p = peval(f.children()[0], a, ctx);
      if (!p) return std::nullopt;
      auto q = peval(f.children()[1], a, ctx);
      if (!q) return std::nullopt;
      return *p == *q;
    }
    case K::Exists:
    case K::Forall: return eval_quantifier(f, a, ctx);
  }
  return std::nullopt;
}

// Depth-first enumeration of vars[index..] with three-valued pruning.
// Returns false once on_model asked to stop.
bool search(const Formula& f, const std::vector<std::string>& vars, std::size_t index, Assignment& a,
            std::uint64_t bound, const std::function<bool(const Assignment&)>& on_model) {
  EvalContext ctx{bound, false};
  auto v = peval(f, a, ctx);
  if (v && !*v) return true;
  if (index == vars.size()) {
    if (!v) throw std::logic_error("search reached a leaf with an undetermined formula");
    return on_model(a);
  }
  const std::string& var = vars[index];
  for (std::uint64_t value = 0; value <= bound; ++value) {
    a[var] = value;
    bool keep_going = search(f, vars, index + 1, a, bound, on_model);
    if (!keep_going) {
      a.erase(var);
      return false;
    }
  }
  a.erase(var);
  return true;
}

void require_cover(const Formula& f, const std::vector<std::string>& vars, const Assignment& fixed) {
  for (const auto& v : f.free_vars())
    if (!fixed.count(v) && std::find(vars.begin(), vars.end(), v) == vars.end())
      throw std::invalid_argument("free variable '" + v + "' is neither enumerated nor fixed");
}

}  // namespace

bool eval(const Formula& f, const Assignment& a, std::optional<std::uint64_t> quantifier_bound) {
  Assignment copy = a;
  auto v = peval(f, copy, EvalContext{quantifier_bound, true});
  if (!v) throw std::logic_error("strict evaluation produced no value");
  return *v;
}

std::vector<Assignment> models_within_bound(const Formula& f, const std::vector<std::string>& vars,
                                            std::uint64_t bound) {
  require_cover(f, vars, {});
  std::vector<Assignment> out;
  Assignment a;
  search(f, vars, 0, a, bound, [&](const Assignment& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

std::optional<Assignment> find_model(const Formula& f, const std::vector<std::string>& vars, std::uint64_t bound,
                                     const Assignment& fixed) {
  require_cover(f, vars, fixed);
  std::vector<std::string> open;
  for (const auto& v : vars)
    if (!fixed.count(v)) open.push_back(v);
  std::optional<Assignment> out;
  Assignment a = fixed;
  search(f, open, 0, a, bound, [&](const Assignment& m) {
    out = m;
    return false;
  });
  return out;
}

// -------------------------------------------------------------- substitution

namespace {

Formula rebuild(const Formula& f, std::vector<Formula> kids) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Not: return Formula::negate(std::move(kids[0]));
    case K::And: return Formula::conj(std::move(kids));
    case K::Or: return Formula::disj(std::move(kids));
    case K::Implies: return Formula::implies(std::move(kids[0]), std::move(kids[1]));
    case K::Iff: return Formula::iff(std::move(kids[0]), std::move(kids[1]));
    default: throw std::logic_error("rebuild on a non-connective");
  }
}

Formula subst(const Formula& f, const std::map<std::string, LinearTerm>& map) {
  using K = Formula::Kind;
  if (map.empty()) return f;
  switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Compare: return Formula::compare(f.lhs().substitute(map), f.relation(), f.rhs().substitute(map));
    case K::Exists:
    case K::Forall: {
      const auto body_fv = f.body().free_vars();
      std::map<std::string, LinearTerm> inner;
      for (const auto& [v, t] : map)
        if (body_fv.count(v) && std::find(f.bound_vars().begin(), f.bound_vars().end(), v) == f.bound_vars().end())
          inner.emplace(v, t);
      if (inner.empty()) return f;
      std::set<std::string> incoming;
      for (const auto& [v, t] : inner)
        for (const auto& [w, c] : t.coefficients()) incoming.insert(w);
      std::set<std::string> taken = incoming;
      taken.insert(body_fv.begin(), body_fv.end());
      taken.insert(f.bound_vars().begin(), f.bound_vars().end());
      std::vector<std::string> vars;
      for (const auto& v : f.bound_vars()) {
        if (!incoming.count(v)) {
          vars.push_back(v);
          continue;
        }
        std::string fresh = v + "'";
        while (taken.count(fresh)) fresh += "'";
        taken.insert(fresh);
        inner[v] = LinearTerm::var(fresh);
        vars.push_back(fresh);
      }
      Formula body = subst(f.body(), inner);
      return f.kind() == K::Exists ? Formula::exists(std::move(vars), std::move(body))
                                   : Formula::forall(std::move(vars), std::move(body));
    }
    default: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(subst(c, map));
      return rebuild(f, std::move(kids));
    }
  }
}

// Renames binders through `namer`, tracking an environment of active renamings.
Formula rename_binders(const Formula& f, std::map<std::string, std::string> env,
                       const std::function<std::string(const std::string&)>& namer) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Compare: {
      std::map<std::string, LinearTerm> m;
      for (const auto& [from, to] : env) m.emplace(from, LinearTerm::var(to));
      return Formula::compare(f.lhs().substitute(m), f.relation(), f.rhs().substitute(m));
    }
    case K::Exists:
    case K::Forall: {
      std::vector<std::string> vars;
      for (const auto& v : f.bound_vars()) {
        std::string name = namer(v);
        env[v] = name;
        vars.push_back(name);
      }
      Formula body = rename_binders(f.body(), env, namer);
      return f.kind() == K::Exists ? Formula::exists(std::move(vars), std::move(body))
                                   : Formula::forall(std::move(vars), std::move(body));
    }
    default: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(rename_binders(c, env, namer));
      return rebuild(f, std::move(kids));
    }
  }
}

}  // namespace

Formula substitute(const Formula& f, const std::map<std::string, LinearTerm>& map) { return subst(f, map); }

Formula rename_free(const Formula& f, const std::map<std::string, std::string>& renaming) {
  std::map<std::string, LinearTerm> m;
  for (const auto& [from, to] : renaming) m.emplace(from, LinearTerm::var(to));
  return subst(f, m);
}

Formula equalities(const Assignment& m) {
  std::vector<Formula> parts;
  for (const auto& [v, value] : m) {
    if (value > static_cast<std::uint64_t>(INT64_MAX)) throw std::overflow_error("value exceeds 64-bit signed range");
    parts.push_back(eq(LinearTerm::var(v), static_cast<std::int64_t>(value)));
  }
  return Formula::conj(std::move(parts));
}

Formula rename_apart(const Formula& f) {
  std::set<std::string> used = f.free_vars();
  std::size_t counter = 0;
  return rename_binders(f, {}, [&](const std::string& v) {
    std::string name = v;
    while (used.count(name)) name = v + "!" + std::to_string(++counter);
    used.insert(name);
    return name;
  });
}

Formula build_e_tilde(const Formula& e, const std::vector<std::string>& first_places,
                      const std::vector<std::string>& second_places, std::string_view first_ns,
                      std::string_view second_ns) {
  auto in = [](const std::vector<std::string>& v, const std::string& p) {
    return std::find(v.begin(), v.end(), p) != v.end();
  };
  for (const auto& v : e.free_vars())
    if (!in(first_places, v) && !in(second_places, v))
      throw std::invalid_argument("E mentions '" + v + "', which is a place of neither net");

  Formula renamed = rename_binders(e, {}, [](const std::string& v) { return "e." + v; });
  std::map<std::string, std::string> ns;
  for (const auto& p : second_places) ns[p] = std::string(second_ns) + "." + p;
  for (const auto& p : first_places) ns[p] = std::string(first_ns) + "." + p;
  std::vector<Formula> parts{rename_free(renamed, ns)};
  for (const auto& p : first_places)
    if (in(second_places, p))
      parts.push_back(eq(LinearTerm::var(std::string(first_ns) + "." + p), LinearTerm::var(std::string(second_ns) + "." + p)));
  return rename_apart(Formula::conj(std::move(parts)));
}

}  // namespace polyabs
