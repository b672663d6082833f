#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace magicforge {

// First-order terms: variables, constants, and compound terms.
// Immutable and shared; structural operations build new terms.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermKind { variable, constant, compound };

struct Term {
  TermKind kind;
  int var_id = -1;           // variable identity (kind == variable)
  std::string name;          // variable: display hint (may be empty); otherwise functor
  std::vector<TermPtr> args; // compound arguments

  static TermPtr var(int id, std::string hint = {});
  static TermPtr constant(std::string name);
  static TermPtr compound(std::string functor, std::vector<TermPtr> args);
};

inline bool is_var(const TermPtr& t) { return t->kind == TermKind::variable; }
inline bool is_const(const TermPtr& t) { return t->kind == TermKind::constant; }
inline bool is_compound(const TermPtr& t) { return t->kind == TermKind::compound; }

// List sugar: '.'(Head, Tail) cells terminated by the constant [].
TermPtr nil();
TermPtr cons(TermPtr head, TermPtr tail);
bool is_nil(const TermPtr& t);
bool is_cons(const TermPtr& t);
TermPtr make_list(const std::vector<TermPtr>& items, TermPtr tail = nullptr);

// Structural equality, including variable identities.
bool equal_term(const TermPtr& a, const TermPtr& b);

// Fresh-variable source. Streams ids from `next` upward.
struct VarGen {
  int next = 0;
  TermPtr fresh(std::string hint = {}) { return Term::var(next++, std::move(hint)); }
};

// Triangular substitution: bindings may mention other bound variables;
// `apply` resolves chains fully, so the observable behavior is idempotent.
struct Substitution {
  std::map<int, TermPtr> bindings;
  bool empty() const { return bindings.empty(); }
};

TermPtr apply(const Substitution& s, const TermPtr& t);

// Most general unifier. `occurs_check` guards against binding a variable to a
// term containing it; with the check off, cyclic bindings are tolerated and
// `apply` leaves the looping variable in place rather than spinning.
std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b,
                                  bool occurs_check = true);

// Extends `s` in place; on failure `s` may hold partial bindings, so callers
// that need rollback should copy first.
bool unify_into(Substitution& s, const TermPtr& a, const TermPtr& b,
                bool occurs_check = true);

// One-way matching: true iff some substitution of `general`'s variables yields
// `specific` exactly (the specific side is frozen). Defines the generality
// preorder; `variant` is its symmetric closure.
bool subsumes(const TermPtr& general, const TermPtr& specific);
bool variant(const TermPtr& a, const TermPtr& b);

// Consistently renames every variable in `t` to a fresh one (hints kept).
TermPtr rename_apart(const TermPtr& t, VarGen& vg);
TermPtr rename_apart(const TermPtr& t, VarGen& vg, std::map<int, TermPtr>& mapping);

// Depth restriction: the root is depth 0 and argument positions add 1; every
// subterm rooted at depth >= d (variables included) becomes a distinct fresh
// variable. Requires d >= 1, so the root itself is never replaced.
TermPtr restrict_term(const TermPtr& t, int d, VarGen& vg);

// var/const have depth 0; a compound is one deeper than its deepest argument.
int term_depth(const TermPtr& t);

void collect_vars(const TermPtr& t, std::vector<int>& order, std::set<int>& seen);
std::set<int> var_set(const TermPtr& t);
bool is_ground(const TermPtr& t);

// Largest id used anywhere in the term, -1 if none.
int max_var_id(const TermPtr& t);

} // namespace magicforge
