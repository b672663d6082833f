#include "magicforge/filters.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "magicforge/printer.hpp"

namespace magicforge {

namespace {

TermPtr make_atom(const std::string& name, std::vector<TermPtr> args) {
  if (args.empty()) return Term::constant(name);
  return Term::compound(name, std::move(args));
}

TermPtr append_arg(const TermPtr& atom, TermPtr extra) {
  std::vector<TermPtr> args = atom->args;
  args.push_back(std::move(extra));
  return Term::compound(atom->name, std::move(args));
}

// Anti-unification. The pair table keeps one generalization variable per
// distinct pair of disagreeing subterms, preserving sharing.
struct LggTable {
  std::vector<std::tuple<TermPtr, TermPtr, TermPtr>> entries;
  VarGen* vg;

  TermPtr var_for(const TermPtr& a, const TermPtr& b) {
    for (const auto& [ea, eb, v] : entries)
      if (equal_term(ea, a) && equal_term(eb, b)) return v;
    TermPtr v = vg->fresh();
    entries.emplace_back(a, b, v);
    return v;
  }
};

TermPtr lgg2(const TermPtr& a, const TermPtr& b, LggTable& table) {
  if (equal_term(a, b)) return a;
  if (is_compound(a) && is_compound(b) && a->name == b->name &&
      a->args.size() == b->args.size()) {
    std::vector<TermPtr> args;
    args.reserve(a->args.size());
    for (size_t i = 0; i < a->args.size(); ++i)
      args.push_back(lgg2(a->args[i], b->args[i], table));
    return Term::compound(a->name, std::move(args));
  }
  return table.var_for(a, b);
}

TermPtr freeze_vars(const TermPtr& t, std::map<int, TermPtr>& frozen, int& counter) {
  if (is_var(t)) {
    auto it = frozen.find(t->var_id);
    if (it != frozen.end()) return it->second;
    TermPtr c = Term::constant("$b" + std::to_string(counter++));
    frozen.emplace(t->var_id, c);
    return c;
  }
  if (is_compound(t)) {
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(freeze_vars(a, frozen, counter));
    return Term::compound(t->name, std::move(args));
  }
  return t;
}

std::string join_ints(const std::set<int>& v) {
  std::ostringstream out;
  out << '[';
  bool first = true;
  for (int i : v) {
    if (!first) out << ',';
    out << i;
    first = false;
  }
  out << ']';
  return out.str();
}

} // namespace

AbstractSeed abstract_seed(const MagicProgram& mp, int depth, VarGen& vg) {
  const std::string& mname = mp.magic_name_of.at(mp.query_pred);
  std::vector<int> kv = mp.kept_positions(mp.query_pred);

  // Guard occurrences: first the query predicate's own guarded clauses, then
  // any other guard-literal occurrence of the seed predicate.
  std::vector<TermPtr> occurrences;
  for (const auto& c : mp.program.clauses) {
    if (pred_of(c.head) != mp.query_pred) continue;
    if (!c.body.empty() && c.body.front()->name == mname)
      occurrences.push_back(c.body.front());
  }
  if (occurrences.empty()) {
    for (const auto& c : mp.program.clauses)
      for (const auto& b : c.body)
        if (b->name == mname) occurrences.push_back(b);
  }

  // Which seed argument slots count as bound: with a trimmed program every
  // kept position does; untrimmed, the adornment decides (default: all).
  auto slot_bound = [&](size_t slot) {
    if (mp.trimmed || !mp.adornment) return true;
    return mp.adornment->bound[static_cast<size_t>(kv[slot]) - 1];
  };

  std::vector<TermPtr> patterns(kv.size());
  if (occurrences.empty()) {
    for (size_t i = 0; i < kv.size(); ++i) patterns[i] = vg.fresh();
  } else {
    for (size_t i = 0; i < kv.size(); ++i) {
      if (!slot_bound(i)) {
        patterns[i] = vg.fresh();
        continue;
      }
      LggTable table{{}, &vg};
      TermPtr acc = occurrences.front()->args[i];
      for (size_t k = 1; k < occurrences.size(); ++k)
        acc = lgg2(acc, occurrences[k]->args[i], table);
      patterns[i] = restrict_term(acc, depth, vg);
    }
    std::map<int, TermPtr> frozen;
    int counter = 0;
    for (size_t i = 0; i < kv.size(); ++i)
      if (slot_bound(i)) patterns[i] = freeze_vars(patterns[i], frozen, counter);
  }
  return AbstractSeed{make_atom(mname, std::move(patterns))};
}

namespace {

AbstractFixpoint fixpoint_excluding(const MagicProgram& mp, int depth, int exclude_id) {
  AbstractFixpoint fp;
  VarGen vg;
  vg.next = std::max(mp.next_var, max_var_id(mp.program) + 1);

  AbstractSeed seed = abstract_seed(mp, depth, vg);
  fp.facts.push_back(restrict_term(seed.atom, depth, vg));

  std::vector<const Clause*> rules;
  for (const auto& c : mp.program.clauses)
    if (c.prov.role == ClauseRole::magic && c.id != exclude_id && !c.body.empty())
      rules.push_back(&c);

  auto have_fact = [&fp](const TermPtr& t) {
    for (const auto& f : fp.facts)
      if (variant(f, t)) return true;
    return false;
  };
  auto have_firing = [&fp](int rule, const TermPtr& pre, const TermPtr& con) {
    for (const auto& f : fp.firings)
      if (f.rule_id == rule && variant(f.premise, pre) && variant(f.conclusion, con))
        return true;
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause* m : rules) {
      for (size_t fi = 0; fi < fp.facts.size(); ++fi) {
        TermPtr fact = fp.facts[fi];
        std::map<int, TermPtr> mapping;
        TermPtr head = rename_apart(m->head, vg, mapping);
        TermPtr guard = rename_apart(m->body.front(), vg, mapping);
        auto theta = unify(guard, fact, true);
        if (!theta) continue;
        TermPtr conclusion = restrict_term(magicforge::apply(*theta, head), depth, vg);
        if (!have_firing(m->id, fact, conclusion))
          fp.firings.push_back(Firing{m->id, fact, conclusion});
        if (!have_fact(conclusion)) {
          fp.facts.push_back(conclusion);
          changed = true;
        }
      }
    }
  }
  return fp;
}

bool variant_set_equal(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  auto covered = [](const std::vector<TermPtr>& xs, const std::vector<TermPtr>& ys) {
    for (const auto& x : xs) {
      bool found = false;
      for (const auto& y : ys)
        if (variant(x, y)) { found = true; break; }
      if (!found) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

TermPtr strip_positions(const TermPtr& atom, const std::set<int>& drop) {
  std::vector<TermPtr> args;
  for (size_t i = 0; i < atom->args.size(); ++i)
    if (!drop.count(static_cast<int>(i) + 1)) args.push_back(atom->args[i]);
  return make_atom(atom->name, std::move(args));
}

} // namespace

AbstractFixpoint abstract_fixpoint(const MagicProgram& mp, int depth) {
  return fixpoint_excluding(mp, depth, -1);
}

void remove_cycles(MagicProgram& mp, int depth) {
  if (depth < 1) throw std::invalid_argument("remove_cycles: depth must be >= 1");
  for (int safety = 0; ; ++safety) {
    if (safety > 10000) throw std::logic_error("remove_cycles: no fixed point");
    AbstractFixpoint fp = fixpoint_excluding(mp, depth, -1);

    std::map<int, std::vector<const Firing*>> by_rule;
    std::vector<int> nodes;
    for (const auto& f : fp.firings) {
      if (!by_rule.count(f.rule_id)) nodes.push_back(f.rule_id);
      by_rule[f.rule_id].push_back(&f);
    }
    std::sort(nodes.begin(), nodes.end());

    // Firing graph: r -> r' when some conclusion of r variant-matches a
    // premise consumed by r'. Candidates are rules on a cycle.
    std::set<std::pair<int, int>> edges;
    for (int r : nodes)
      for (int r2 : nodes) {
        bool edge = false;
        for (const Firing* a : by_rule[r]) {
          for (const Firing* b : by_rule[r2]) {
            if (pred_of(a->conclusion) == pred_of(b->premise) &&
                variant(a->conclusion, b->premise)) {
              edge = true;
              break;
            }
          }
          if (edge) break;
        }
        if (edge) edges.insert({r, r2});
      }
    std::map<int, std::set<int>> reach;
    for (const auto& [x, y] : edges) reach[x].insert(y);
    bool grew = true;
    while (grew) {
      grew = false;
      for (int r : nodes)
        for (int mid : std::set<int>(reach[r].begin(), reach[r].end()))
          for (int tgt : reach[mid])
            if (reach[r].insert(tgt).second) grew = true;
    }
    std::vector<int> candidates;
    for (int r : nodes)
      if (reach[r].count(r)) candidates.push_back(r);

    // Plain deletion: remove a cycling rule when the fixpoint does not change.
    bool deleted_any = false;
    for (int r : candidates) {
      AbstractFixpoint without = fixpoint_excluding(mp, depth, r);
      if (variant_set_equal(fp.facts, without.facts)) {
        const Clause* clause = mp.program.find_clause(r);
        mp.report.push_back("cycle: removed guard rule " + std::to_string(r) + ": " +
                            (clause ? print_clause(*clause) : std::string("?")));
        delete_clause(mp, r);
        deleted_any = true;
        break;
      }
    }
    if (deleted_any) continue;

    // Fresh-variable pump: the rule regenerates its own guard except for
    // positions it refreshes each time. Bar those positions from the guard,
    // re-trim, and start over (earlier deletions are recomputed).
    if (mp.trimmed) {
      bool dropped = false;
      for (int r : candidates) {
        for (const Firing* f : by_rule[r]) {
          if (pred_of(f->premise) != pred_of(f->conclusion)) continue;
          if (variant(f->premise, f->conclusion)) continue;
          std::set<int> premise_vars = var_set(f->premise);
          std::set<int> drop;
          for (size_t q = 0; q < f->conclusion->args.size(); ++q) {
            const TermPtr& a = f->conclusion->args[q];
            if (is_var(a) && !premise_vars.count(a->var_id))
              drop.insert(static_cast<int>(q) + 1);
          }
          if (drop.empty()) continue;
          if (!variant(strip_positions(f->premise, drop),
                       strip_positions(f->conclusion, drop)))
            continue;
          const Predicate& src = mp.source_of_magic.at(f->conclusion->name);
          if (src == mp.query_pred) continue;
          std::vector<int> kv = mp.kept_positions(src);
          std::set<int> src_positions;
          for (int q : drop) src_positions.insert(kv[static_cast<size_t>(q) - 1]);
          for (int sp : src_positions) mp.forbidden[src].insert(sp);
          mp.report.push_back("drop: " + mp.magic_name_of.at(src) +
                              " source positions " + join_ints(src_positions) +
                              " (fresh-variable pump)");
          mp.deleted.clear();
          retrim(mp);
          dropped = true;
          break;
        }
        if (dropped) break;
      }
      if (dropped) continue;
    }
    break;
  }
}

void add_indexing(MagicProgram& mp, IndexScope scope) {
  if (mp.mode == CompileMode::lexical_only)
    throw std::invalid_argument("add_indexing: requires guards on the defined clauses");

  std::vector<std::string> order;
  std::map<std::string, std::vector<int>> defs; // magic name -> defining rule ids
  for (const auto& c : mp.program.clauses) {
    if (c.prov.role != ClauseRole::magic) continue;
    if (!defs.count(c.head->name)) order.push_back(c.head->name);
    defs[c.head->name].push_back(c.id);
  }

  VarGen vg;
  vg.next = std::max(mp.next_var, max_var_id(mp.program) + 1);

  auto clause_by_id = [&mp](int id) -> Clause* {
    for (auto& c : mp.program.clauses)
      if (c.id == id) return &c;
    return nullptr;
  };

  for (const auto& mname : order) {
    const Predicate& src = mp.source_of_magic.at(mname);
    if (src == mp.query_pred) continue; // the seed has no instigating call site
    const auto& rule_ids = defs[mname];

    bool in_scope = scope == IndexScope::all;
    if (!in_scope && rule_ids.size() >= 2) {
      for (size_t i = 0; i < rule_ids.size() && !in_scope; ++i)
        for (size_t j = i + 1; j < rule_ids.size() && !in_scope; ++j) {
          TermPtr hi = rename_apart(clause_by_id(rule_ids[i])->head, vg);
          TermPtr hj = rename_apart(clause_by_id(rule_ids[j])->head, vg);
          if (unify(hi, hj, true)) in_scope = true;
        }
    }
    if (!in_scope) continue;

    int old_arity = static_cast<int>(clause_by_id(rule_ids.front())->head->args.size());

    for (size_t k = 0; k < rule_ids.size(); ++k) {
      Clause* rule = clause_by_id(rule_ids[k]);
      std::string tag = "index_" + std::to_string(k + 1);
      rule->head = append_arg(rule->head, Term::constant(tag));
      mp.index_of_rule[rule->id] = tag;
      int r = rule->prov.source_clause;
      int k0 = rule->prov.literal_index;
      for (auto& d : mp.program.clauses) {
        if (d.prov.role == ClauseRole::modified && d.id == r) {
          int offset = (!d.body.empty() && mp.is_magic_atom(d.body.front())) ? 1 : 0;
          size_t pos = static_cast<size_t>(offset + k0 - 1);
          if (pos < d.body.size() && d.body[pos]->name == src.name)
            d.body[pos] = append_arg(d.body[pos], Term::constant(tag));
        }
        if (d.prov.role == ClauseRole::magic && d.prov.source_clause == r &&
            d.prov.literal_index > k0) {
          size_t pos = static_cast<size_t>(k0); // body[0] is the guard
          if (pos < d.body.size() && d.body[pos]->name == src.name)
            d.body[pos] = append_arg(d.body[pos], Term::constant(tag));
        }
      }
      mp.report.push_back("index: " + mname + " rule " + std::to_string(rule->id) +
                          " tagged " + tag + " (clause " + std::to_string(r) +
                          " literal " + std::to_string(k0) + ")");
    }

    // Thread a shared index variable through the defined predicate's clauses.
    for (auto& d : mp.program.clauses) {
      if (d.prov.role != ClauseRole::modified || pred_of(d.head) != src) continue;
      TermPtr iv = Term::var(vg.next++, "INDEX");
      d.head = append_arg(d.head, iv);
      if (!d.body.empty() && d.body.front()->name == mname)
        d.body.front() = append_arg(d.body.front(), iv);
    }
    // Any remaining occurrence at the old arity accepts every index value.
    for (auto& d : mp.program.clauses) {
      if (d.head->name == mname && static_cast<int>(d.head->args.size()) == old_arity)
        d.head = append_arg(d.head, Term::var(vg.next++, "INDEX"));
      for (auto& b : d.body) {
        if (b->name == mname && static_cast<int>(b->args.size()) == old_arity)
          b = append_arg(b, Term::var(vg.next++, "INDEX"));
        else if (b->name == src.name &&
                 static_cast<int>(b->args.size()) == src.arity)
          b = append_arg(b, Term::var(vg.next++, "INDEX"));
      }
    }
    mp.indexed_magic.insert(mname);
    mp.report.push_back("index: " + src.display() + " extended with an index argument");
  }
  mp.next_var = vg.next;
}

void unfold_magic(MagicProgram& mp) {
  const std::string seed_name = mp.magic_name_of.at(mp.query_pred);
  for (;;) {
    // First guard predicate (in defining-rule order) with a single defining
    // rule whose body is entirely guard literals.
    std::vector<std::string> order;
    std::map<std::string, std::vector<const Clause*>> defs;
    for (const auto& c : mp.program.clauses) {
      if (c.prov.role != ClauseRole::magic) continue;
      if (!defs.count(c.head->name)) order.push_back(c.head->name);
      defs[c.head->name].push_back(&c);
    }
    std::string target;
    Clause spent;
    for (const auto& name : order) {
      if (name == seed_name) continue;
      if (defs[name].size() != 1) continue;
      const Clause* c = defs[name].front();
      bool all_magic = !c->body.empty();
      bool self = false;
      for (const auto& b : c->body) {
        if (!mp.is_magic_atom(b)) all_magic = false;
        if (b->name == name) self = true;
      }
      if (!all_magic || self) continue;
      target = name;
      spent = *c;
      break;
    }
    if (target.empty()) break;

    VarGen vg;
    vg.next = std::max(mp.next_var, max_var_id(mp.program) + 1);

    std::vector<Clause> out;
    out.reserve(mp.program.clauses.size());
    for (const auto& d : mp.program.clauses) {
      Clause nd = d;
      bool dead = false;
      if (nd.id != spent.id) {
        for (;;) {
          int idx = -1;
          for (size_t i = 0; i < nd.body.size(); ++i)
            if (nd.body[i]->name == target) {
              idx = static_cast<int>(i);
              break;
            }
          if (idx < 0) break;
          std::map<int, TermPtr> mapping;
          TermPtr rh = rename_apart(spent.head, vg, mapping);
          std::vector<TermPtr> rb;
          rb.reserve(spent.body.size());
          for (const auto& b : spent.body) rb.push_back(rename_apart(b, vg, mapping));
          auto theta = unify(nd.body[static_cast<size_t>(idx)], rh, true);
          if (!theta) {
            // No derivation can satisfy the literal: the host clause is dead.
            mp.report.push_back("unfold: removed clause " + std::to_string(nd.id) +
                                " (no " + target + " derivation matches)");
            dead = true;
            break;
          }
          std::vector<TermPtr> nb;
          nb.insert(nb.end(), nd.body.begin(), nd.body.begin() + idx);
          nb.insert(nb.end(), rb.begin(), rb.end());
          nb.insert(nb.end(), nd.body.begin() + idx + 1, nd.body.end());
          for (auto& b : nb) b = magicforge::apply(*theta, b);
          nd.body = std::move(nb);
          nd.head = magicforge::apply(*theta, nd.head);
          nd.prov.unfolded = true;
          mp.report.push_back("unfold: inlined " + target + " into clause " +
                              std::to_string(nd.id));
        }
      }
      if (!dead) out.push_back(std::move(nd));
    }
    mp.program.clauses = std::move(out);
    mp.next_var = vg.next;

    bool still_used = false;
    for (const auto& d : mp.program.clauses)
      for (const auto& b : d.body)
        if (b->name == target) still_used = true;
    if (!still_used) {
      auto& cs = mp.program.clauses;
      cs.erase(std::remove_if(cs.begin(), cs.end(),
                              [&spent](const Clause& c) { return c.id == spent.id; }),
               cs.end());
      mp.unfolded_away.insert(target);
      mp.report.push_back("unfold: removed guard rule " + std::to_string(spent.id) +
                          " (" + target + ")");
    } else {
      break; // defensive: every occurrence should have been rewritten
    }
  }
}

std::vector<DuplicateCluster> analyze_duplicates(const Chart& chart) {
  std::vector<Predicate> order;
  std::map<Predicate, std::vector<int>> groups;
  for (const auto& f : chart.facts) {
    if (!f.live) continue;
    Predicate p = pred_of(f.atom);
    if (!groups.count(p)) order.push_back(p);
    groups[p].push_back(f.id);
  }

  auto same_derivation = [&chart](int a, int b) {
    const Derivation& da = chart.fact(a).how;
    const Derivation& db = chart.fact(b).how;
    return da.is_seed == db.is_seed && da.rule_id == db.rule_id &&
           da.premises == db.premises;
  };

  std::vector<DuplicateCluster> out;
  for (const auto& p : order) {
    const auto& ids = groups[p];
    std::vector<bool> used(ids.size(), false);
    for (size_t i = 0; i < ids.size(); ++i) {
      if (used[i]) continue;
      std::vector<int> cluster{ids[i]};
      for (size_t j = i + 1; j < ids.size(); ++j) {
        if (used[j]) continue;
        if (variant(chart.fact(ids[i]).atom, chart.fact(ids[j]).atom)) {
          cluster.push_back(ids[j]);
          used[j] = true;
        }
      }
      if (cluster.size() < 2) continue;
      bool distinct = false;
      for (size_t a = 0; a < cluster.size() && !distinct; ++a)
        for (size_t b = a + 1; b < cluster.size() && !distinct; ++b)
          if (!same_derivation(cluster[a], cluster[b])) distinct = true;
      if (distinct) out.push_back(DuplicateCluster{p, std::move(cluster)});
    }
  }
  return out;
}

} // namespace magicforge
