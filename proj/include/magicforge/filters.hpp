#pragma once

#include <vector>

#include "magicforge/engine.hpp"
#include "magicforge/magic.hpp"

namespace magicforge {

struct AbstractSeed {
  TermPtr atom;
};

// One abstract rule application: the guard fact consumed and the fact produced.
struct Firing {
  int rule_id;
  TermPtr premise;
  TermPtr conclusion;
};

struct AbstractFixpoint {
  std::vector<TermPtr> facts;   // depth-restricted, deduplicated up to variants
  std::vector<Firing> firings;  // deduplicated up to variant pairs per rule
};

// Abstract seed for the query's guard predicate: per kept position, the
// depth-restricted least general generalization of that argument across the
// query predicate's guarded clauses. Generalization variables at bound
// positions are frozen to reserved marker constants ($b0, $b1, ...) so that
// abstract facts reached through different rules stay distinguishable; with
// no guards to generalize, every position is a fresh variable.
AbstractSeed abstract_seed(const MagicProgram& mp, int depth, VarGen& vg);

// Least set of depth-restricted guard facts closed under the guard rules,
// starting from the abstract seed. Only the guard literal of each rule is
// joined against the set; other body literals impose no constraints.
AbstractFixpoint abstract_fixpoint(const MagicProgram& mp, int depth);

// Deletes guard rules that the abstract evaluation shows to be cycling and
// redundant (the fixpoint without the rule is variant-equal), iterated to a
// fixed point in clause order. A cycling rule that pumps fresh variables into
// specific argument positions instead has those positions barred from the
// guard and the trim re-run, until neither action applies.
void remove_cycles(MagicProgram& mp, int depth);

enum class IndexScope { overlapping_only, all };

// Appends a distinct index constant to each defining guard rule of an
// in-scope guard predicate, tags the instigating call-site literal (and its
// copies inside other guard rules) with the same constant, and threads a
// fresh index variable through the defined predicate's own clauses.
void add_indexing(MagicProgram& mp, IndexScope scope = IndexScope::overlapping_only);

// Repeatedly inlines guard predicates that have exactly one defining rule
// whose body consists solely of guard literals, propagating the unifier over
// the whole host clause, then deletes the spent rule. The query's own guard
// predicate is never unfolded (the runtime seed feeds it directly).
void unfold_magic(MagicProgram& mp);

struct DuplicateCluster {
  Predicate pred;
  std::vector<int> fact_ids; // >= 2 variant facts with distinct derivations
};

// Groups of variant live facts derived more than once. Empty iff the chart
// is free of duplicate derivations.
std::vector<DuplicateCluster> analyze_duplicates(const Chart& chart);

} // namespace magicforge
