#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "magicforge/program.hpp"

namespace magicforge {

enum class CompileMode { full_magic, lexical_only };

// Result of the guard-introduction transform plus the state the later
// optimization passes need: the untouched source, the full-arity transform
// output (`base`), and the current rewritten program. Pruning, trimming and
// rule deletion are recorded as state and `rebuild` re-derives `program`
// from `base`, so the trimming pass can be re-run with stronger constraints.
struct MagicProgram {
  Program source;
  Program base;
  Program program;

  CompileMode mode = CompileMode::full_magic;
  Predicate query_pred;

  // Source predicate -> its guard predicate name (stable across passes).
  std::map<Predicate, std::string> magic_name_of;
  // Guard predicate name -> source predicate (unique by construction).
  std::map<std::string, Predicate> source_of_magic;
  // Guard predicates in first-creation order (query predicate first).
  std::vector<Predicate> magic_order;

  bool pruned = false;
  std::vector<Predicate> lexical_pruned;

  bool trimmed = false;
  bool keep_structural = false;
  std::optional<AbstractQuery> adornment;
  // Source predicate -> kept guard positions (1-based, sorted). Only
  // meaningful when trimmed; untrimmed guards keep every position.
  std::map<Predicate, std::vector<int>> kept;
  // Positions barred from `kept` (grown by the cycle analysis).
  std::map<Predicate, std::set<int>> forbidden;

  // Base clause ids removed by the cycle analysis.
  std::set<int> deleted;

  // Indexing and unfolding state (applied to `program` in place, after any
  // retrimming has settled).
  std::map<int, std::string> index_of_rule;  // guard-rule id -> index constant
  std::set<std::string> indexed_magic;       // guard predicates with an index argument
  std::set<std::string> unfolded_away;       // guard predicates eliminated by unfolding

  std::vector<std::string> report;
  int next_var = 0;

  bool is_magic_name(const std::string& name) const {
    return source_of_magic.count(name) != 0;
  }
  bool is_magic_atom(const TermPtr& atom) const { return is_magic_name(atom->name); }
  // Kept positions of a source predicate's guard (all positions if untrimmed).
  std::vector<int> kept_positions(const Predicate& src_pred) const;
  // Current arity of the guard predicate for `src_pred` (index argument included).
  Predicate current_magic_pred(const Predicate& src_pred) const;
};

// Guard introduction for `query_pred`. full_magic guards every clause of the
// program; lexical_only attaches guards only to clauses of predicates whose
// definitions are entirely unit clauses. Guard-derivation rules are emitted
// for every body literal of every rule in both modes, grouped by guarded
// predicate in first-use order.
MagicProgram magic_transform(const Program& source, const Predicate& query_pred,
                             CompileMode mode = CompileMode::full_magic);

// Shorthand for the unit-clause-guards variant of the transform.
MagicProgram lexical_only_transform(const Program& source, const Predicate& query_pred);

// Projects a concrete query atom onto the guard predicate's kept positions.
// Throws std::invalid_argument if the atom's predicate is not the query predicate.
TermPtr make_seed(const MagicProgram& mp, const TermPtr& query_atom);

// Removes guard rules for predicates defined entirely by unit clauses and
// reverts the guards on those predicates' own clauses. Incompatible with
// lexical_only mode (throws std::invalid_argument).
void prune_lexical_magic(MagicProgram& mp);

// Computes which guard positions carry usable bindings, starting from the
// query adornment and propagating through guard rules; data flow through
// source literals uses a per-predicate groundability analysis. All guard
// atoms are then projected onto their kept positions. keep_structural
// additionally keeps non-variable head arguments as structural filters.
void adorn_and_trim(MagicProgram& mp, const AbstractQuery& aq,
                    bool keep_structural = false);

// Re-runs the trim with the current adornment, forbidden positions and
// deletions (used by the cycle analysis after strengthening `forbidden`).
void retrim(MagicProgram& mp);

// Marks a base clause deleted and rebuilds the current program.
void delete_clause(MagicProgram& mp, int clause_id);

// Re-derives mp.program from mp.base plus the recorded prune/trim/delete state.
void rebuild(MagicProgram& mp);

} // namespace magicforge
