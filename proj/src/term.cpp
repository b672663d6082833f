#include "magicforge/term.hpp"

#include <cassert>
#include <stdexcept>

namespace magicforge {

TermPtr Term::var(int id, std::string hint) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::variable;
  t->var_id = id;
  t->name = std::move(hint);
  return t;
}

TermPtr Term::constant(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::constant;
  t->name = std::move(name);
  return t;
}

TermPtr Term::compound(std::string functor, std::vector<TermPtr> args) {
  assert(!args.empty());
  auto t = std::make_shared<Term>();
  t->kind = TermKind::compound;
  t->name = std::move(functor);
  t->args = std::move(args);
  return t;
}

TermPtr nil() {
  static const TermPtr n = Term::constant("[]");
  return n;
}

TermPtr cons(TermPtr head, TermPtr tail) {
  return Term::compound(".", {std::move(head), std::move(tail)});
}

bool is_nil(const TermPtr& t) { return is_const(t) && t->name == "[]"; }

bool is_cons(const TermPtr& t) {
  return is_compound(t) && t->name == "." && t->args.size() == 2;
}

TermPtr make_list(const std::vector<TermPtr>& items, TermPtr tail) {
  TermPtr acc = tail ? tail : nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) acc = cons(*it, acc);
  return acc;
}

bool equal_term(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::variable: return a->var_id == b->var_id;
    case TermKind::constant: return a->name == b->name;
    case TermKind::compound:
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!equal_term(a->args[i], b->args[i])) return false;
      return true;
  }
  return false;
}

namespace {

// Resolves a top-level variable through the binding chain. The visited set
// stops cycles that can exist when unification ran without the occurs check.
TermPtr walk(const Substitution& s, TermPtr t) {
  std::set<int> visited;
  while (is_var(t)) {
    auto it = s.bindings.find(t->var_id);
    if (it == s.bindings.end()) return t;
    if (!visited.insert(t->var_id).second) return t;
    t = it->second;
  }
  return t;
}

TermPtr apply_rec(const Substitution& s, const TermPtr& t, std::set<int>& on_path) {
  if (is_var(t)) {
    auto it = s.bindings.find(t->var_id);
    if (it == s.bindings.end()) return t;
    if (!on_path.insert(t->var_id).second) return t; // cyclic binding: stop
    TermPtr r = apply_rec(s, it->second, on_path);
    on_path.erase(t->var_id);
    return r;
  }
  if (is_compound(t)) {
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    bool changed = false;
    for (const auto& a : t->args) {
      TermPtr r = apply_rec(s, a, on_path);
      changed = changed || r.get() != a.get();
      args.push_back(std::move(r));
    }
    if (!changed) return t;
    return Term::compound(t->name, std::move(args));
  }
  return t;
}

bool occurs(const Substitution& s, int var, const TermPtr& t, std::set<int>& visited) {
  TermPtr w = walk(s, t);
  if (is_var(w)) {
    if (w->var_id == var) return true;
    return false;
  }
  if (is_compound(w)) {
    for (const auto& a : w->args) {
      if (is_var(a) && !visited.insert(a->var_id).second) continue;
      if (occurs(s, var, a, visited)) return true;
    }
  }
  return false;
}

} // namespace

TermPtr apply(const Substitution& s, const TermPtr& t) {
  if (s.empty()) return t;
  std::set<int> on_path;
  return apply_rec(s, t, on_path);
}

bool unify_into(Substitution& s, const TermPtr& a0, const TermPtr& b0, bool occurs_check) {
  TermPtr a = walk(s, a0);
  TermPtr b = walk(s, b0);
  if (is_var(a) && is_var(b) && a->var_id == b->var_id) return true;
  if (is_var(a)) {
    if (occurs_check) {
      std::set<int> visited;
      if (occurs(s, a->var_id, b, visited)) return false;
    }
    s.bindings[a->var_id] = b;
    return true;
  }
  if (is_var(b)) {
    if (occurs_check) {
      std::set<int> visited;
      if (occurs(s, b->var_id, a, visited)) return false;
    }
    s.bindings[b->var_id] = a;
    return true;
  }
  if (a->kind != b->kind) return false;
  if (is_const(a)) return a->name == b->name;
  if (a->name != b->name || a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!unify_into(s, a->args[i], b->args[i], occurs_check)) return false;
  return true;
}

std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b, bool occurs_check) {
  Substitution s;
  if (!unify_into(s, a, b, occurs_check)) return std::nullopt;
  return s;
}

namespace {

bool match_rec(const TermPtr& general, const TermPtr& specific,
               std::map<int, TermPtr>& binding) {
  if (is_var(general)) {
    auto it = binding.find(general->var_id);
    if (it != binding.end()) return equal_term(it->second, specific);
    binding.emplace(general->var_id, specific);
    return true;
  }
  if (specific->kind != general->kind) return false;
  if (is_const(general)) return general->name == specific->name;
  if (general->name != specific->name || general->args.size() != specific->args.size())
    return false;
  for (size_t i = 0; i < general->args.size(); ++i)
    if (!match_rec(general->args[i], specific->args[i], binding)) return false;
  return true;
}

} // namespace

bool subsumes(const TermPtr& general, const TermPtr& specific) {
  std::map<int, TermPtr> binding;
  return match_rec(general, specific, binding);
}

bool variant(const TermPtr& a, const TermPtr& b) {
  return subsumes(a, b) && subsumes(b, a);
}

namespace {

TermPtr rename_rec(const TermPtr& t, VarGen& vg, std::map<int, TermPtr>& mapping) {
  if (is_var(t)) {
    auto it = mapping.find(t->var_id);
    if (it != mapping.end()) return it->second;
    TermPtr fresh = vg.fresh(t->name);
    mapping.emplace(t->var_id, fresh);
    return fresh;
  }
  if (is_compound(t)) {
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(rename_rec(a, vg, mapping));
    return Term::compound(t->name, std::move(args));
  }
  return t;
}

TermPtr restrict_rec(const TermPtr& t, int depth, int d, VarGen& vg) {
  if (depth >= d) return vg.fresh();
  if (is_compound(t)) {
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(restrict_rec(a, depth + 1, d, vg));
    return Term::compound(t->name, std::move(args));
  }
  return t;
}

} // namespace

TermPtr rename_apart(const TermPtr& t, VarGen& vg, std::map<int, TermPtr>& mapping) {
  return rename_rec(t, vg, mapping);
}

TermPtr rename_apart(const TermPtr& t, VarGen& vg) {
  std::map<int, TermPtr> mapping;
  return rename_rec(t, vg, mapping);
}

TermPtr restrict_term(const TermPtr& t, int d, VarGen& vg) {
  if (d < 1) throw std::invalid_argument("restrict_term: depth bound must be >= 1");
  return restrict_rec(t, 0, d, vg);
}

int term_depth(const TermPtr& t) {
  if (!is_compound(t)) return 0;
  int m = 0;
  for (const auto& a : t->args) m = std::max(m, term_depth(a));
  return 1 + m;
}

void collect_vars(const TermPtr& t, std::vector<int>& order, std::set<int>& seen) {
  if (is_var(t)) {
    if (seen.insert(t->var_id).second) order.push_back(t->var_id);
    return;
  }
  for (const auto& a : t->args) collect_vars(a, order, seen);
}

std::set<int> var_set(const TermPtr& t) {
  std::vector<int> order;
  std::set<int> seen;
  collect_vars(t, order, seen);
  return seen;
}

bool is_ground(const TermPtr& t) {
  if (is_var(t)) return false;
  for (const auto& a : t->args)
    if (!is_ground(a)) return false;
  return true;
}

int max_var_id(const TermPtr& t) {
  if (is_var(t)) return t->var_id;
  int m = -1;
  for (const auto& a : t->args) m = std::max(m, max_var_id(a));
  return m;
}

} // namespace magicforge
