#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "magicforge/term.hpp"

namespace magicforge {

struct Predicate {
  std::string name;
  int arity = 0;
  auto operator<=>(const Predicate&) const = default;
  std::string display() const { return name + "/" + std::to_string(arity); }
};

// Where a clause came from, so later passes can correlate guard predicates
// with the call sites that instigated them.
enum class ClauseRole {
  source,        // as written by the user
  modified,      // source clause, possibly with a guard literal prepended
  magic,         // guard-derivation rule for one body literal of a source clause
  seed_template, // placeholder for the runtime seed shape
};

struct Provenance {
  ClauseRole role = ClauseRole::source;
  int source_clause = -1; // originating source clause id (modified/magic)
  int literal_index = -1; // 1-based body literal the rule derives a guard for
  bool unfolded = false;  // body rewritten by guard unfolding
};

struct Clause {
  int id = 0;
  TermPtr head;
  std::vector<TermPtr> body;
  Provenance prov;
  bool is_unit() const { return body.empty(); }
};

// Binding pattern for a predicate's arguments: true = bound, false = free.
struct AbstractQuery {
  Predicate pred;
  std::vector<bool> bound;
};

struct Program {
  std::vector<Clause> clauses;
  std::optional<AbstractQuery> mode; // from a mode directive, if any
  std::optional<TermPtr> query;      // from a query line, if any
  int next_var = 0;                  // first unused variable id
  std::vector<std::string> warnings;

  const Clause* find_clause(int id) const;
};

Predicate pred_of(const TermPtr& atom);

// True iff every defining clause of `pred` is a unit clause.
// Throws std::invalid_argument when the predicate has no defining clause.
bool is_lexical(const Program& p, const Predicate& pred);

// All predicates with at least one defining clause, in first-definition order.
std::vector<Predicate> defined_predicates(const Program& p);

// Clause-level generality: both clauses wrapped as single terms and compared.
bool clause_variant(const Clause& a, const Clause& b);

int max_var_id(const Program& p);

} // namespace magicforge
