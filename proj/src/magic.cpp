#include "magicforge/magic.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace magicforge {

namespace {

TermPtr make_atom(const std::string& name, std::vector<TermPtr> args) {
  if (args.empty()) return Term::constant(name);
  return Term::compound(name, std::move(args));
}

bool subset(const std::set<int>& a, const std::set<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::set<int> all_positions(int arity) {
  std::set<int> s;
  for (int i = 1; i <= arity; ++i) s.insert(i);
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << v[i];
  }
  out << ']';
  return out.str();
}

// Which output positions of a predicate become ground, given ground inputs.
// Demand-driven greatest fixpoint: unvisited queries start fully optimistic
// and shrink by chaotic iteration. Within a clause the known-variable set
// grows in a single left-to-right pass over the body, mirroring the
// evaluation order.
class GroundOracle {
 public:
  explicit GroundOracle(const Program& src) {
    for (const auto& c : src.clauses) clauses_of_[pred_of(c.head)].push_back(&c);
  }

  std::set<int> out(const Predicate& p, const std::set<int>& in) {
    demand(p, in);
    stabilize();
    return val_.at({p, in});
  }

 private:
  using Key = std::pair<Predicate, std::set<int>>;

  std::set<int> demand(const Predicate& p, const std::set<int>& in) {
    auto [it, inserted] = val_.try_emplace(Key{p, in}, all_positions(p.arity));
    if (inserted) dirty_ = true;
    return it->second;
  }

  void stabilize() {
    do {
      dirty_ = false;
      std::vector<Key> keys;
      keys.reserve(val_.size());
      for (const auto& kv : val_) keys.push_back(kv.first);
      for (const auto& k : keys) {
        std::set<int> nv = eval(k.first, k.second);
        auto& slot = val_.at(k);
        if (nv != slot) {
          slot = std::move(nv);
          dirty_ = true;
        }
      }
    } while (dirty_);
  }

  std::set<int> eval(const Predicate& p, const std::set<int>& in) {
    auto it = clauses_of_.find(p);
    if (it == clauses_of_.end()) return all_positions(p.arity); // underivable
    std::set<int> result;
    bool first = true;
    for (const Clause* c : it->second) {
      std::set<int> known;
      for (int pos : in) {
        auto vs = var_set(c->head->args[pos - 1]);
        known.insert(vs.begin(), vs.end());
      }
      for (const auto& lit : c->body) {
        std::set<int> in_l;
        for (size_t q = 0; q < lit->args.size(); ++q)
          if (subset(var_set(lit->args[q]), known)) in_l.insert(static_cast<int>(q) + 1);
        std::set<int> outs = demand(pred_of(lit), in_l);
        for (int o : outs) {
          auto vs = var_set(lit->args[o - 1]);
          known.insert(vs.begin(), vs.end());
        }
      }
      std::set<int> cres;
      for (size_t pos = 0; pos < c->head->args.size(); ++pos)
        if (subset(var_set(c->head->args[pos]), known)) cres.insert(static_cast<int>(pos) + 1);
      if (first) {
        result = std::move(cres);
        first = false;
      } else {
        std::set<int> inter;
        std::set_intersection(result.begin(), result.end(), cres.begin(), cres.end(),
                              std::inserter(inter, inter.begin()));
        result = std::move(inter);
      }
    }
    return result;
  }

  std::map<Predicate, std::vector<const Clause*>> clauses_of_;
  std::map<Key, std::set<int>> val_;
  bool dirty_ = false;
};

} // namespace

std::vector<int> MagicProgram::kept_positions(const Predicate& src_pred) const {
  if (!trimmed) {
    std::vector<int> all(src_pred.arity);
    for (int i = 0; i < src_pred.arity; ++i) all[i] = i + 1;
    return all;
  }
  auto it = kept.find(src_pred);
  if (it == kept.end()) return {};
  return it->second;
}

Predicate MagicProgram::current_magic_pred(const Predicate& src_pred) const {
  const std::string& name = magic_name_of.at(src_pred);
  int arity = static_cast<int>(kept_positions(src_pred).size());
  if (indexed_magic.count(name)) ++arity;
  return Predicate{name, arity};
}

MagicProgram magic_transform(const Program& source, const Predicate& query_pred,
                             CompileMode mode) {
  MagicProgram mp;
  mp.source = source;
  mp.mode = mode;
  mp.query_pred = query_pred;
  mp.next_var = source.next_var;

  // Mentioned predicates in scan order: heads, then body literals, clause by clause.
  std::vector<Predicate> mentioned;
  auto note = [&mentioned](const Predicate& p) {
    for (const auto& q : mentioned)
      if (q == p) return;
    mentioned.push_back(p);
  };
  for (const auto& c : source.clauses) {
    note(pred_of(c.head));
    for (const auto& b : c.body) note(pred_of(b));
  }
  note(query_pred);

  // Source predicate names (any arity) that guard names must avoid.
  std::set<std::string> taken;
  for (const auto& p : mentioned) taken.insert(p.name);

  for (const auto& p : mentioned) {
    std::string candidate = "magic_" + p.name;
    if (taken.count(candidate))
      candidate = "magic_" + p.name + "_" + std::to_string(p.arity);
    while (taken.count(candidate) || mp.source_of_magic.count(candidate))
      candidate += "_";
    mp.magic_name_of.emplace(p, candidate);
    mp.source_of_magic.emplace(candidate, p);
  }

  auto magic_atom_for = [&mp](const TermPtr& atom) {
    return make_atom(mp.magic_name_of.at(pred_of(atom)), atom->args);
  };

  std::set<Predicate> lexical;
  if (mode == CompileMode::lexical_only) {
    for (const auto& p : defined_predicates(source))
      if (is_lexical(source, p)) lexical.insert(p);
  }

  int next_id = 0;
  for (const auto& c : source.clauses) next_id = std::max(next_id, c.id);
  ++next_id;

  // Modified clauses, in source order, ids preserved.
  int guarded = 0;
  for (const auto& c : source.clauses) {
    Clause m = c;
    m.prov = Provenance{ClauseRole::modified, c.id, -1, false};
    bool guard = mode == CompileMode::full_magic || lexical.count(pred_of(c.head)) > 0;
    if (guard) {
      m.body.insert(m.body.begin(), magic_atom_for(c.head));
      ++guarded;
    }
    mp.base.clauses.push_back(std::move(m));
  }

  // Guard-derivation rules, grouped by guarded predicate in first-use order.
  std::vector<Predicate> group_order;
  std::map<Predicate, std::vector<Clause>> groups;
  for (const auto& c : source.clauses) {
    for (size_t k = 0; k < c.body.size(); ++k) {
      const TermPtr& lit = c.body[k];
      Predicate q = pred_of(lit);
      Clause g;
      g.head = magic_atom_for(lit);
      g.body.push_back(magic_atom_for(c.head));
      for (size_t j = 0; j < k; ++j) g.body.push_back(c.body[j]);
      g.prov = Provenance{ClauseRole::magic, c.id, static_cast<int>(k) + 1, false};
      if (!groups.count(q)) group_order.push_back(q);
      groups[q].push_back(std::move(g));
    }
  }
  int rules = 0;
  for (const auto& q : group_order) {
    for (auto& g : groups[q]) {
      g.id = next_id++;
      mp.base.clauses.push_back(std::move(g));
      ++rules;
    }
  }

  mp.magic_order.push_back(query_pred);
  for (const auto& q : group_order)
    if (q != query_pred) mp.magic_order.push_back(q);

  mp.base.next_var = source.next_var;
  mp.report.push_back("compile: " + std::to_string(guarded) + " guarded clauses, " +
                      std::to_string(rules) + " guard rules, query " +
                      query_pred.display());
  rebuild(mp);
  return mp;
}

MagicProgram lexical_only_transform(const Program& source, const Predicate& query_pred) {
  return magic_transform(source, query_pred, CompileMode::lexical_only);
}

TermPtr make_seed(const MagicProgram& mp, const TermPtr& query_atom) {
  if (pred_of(query_atom) != mp.query_pred)
    throw std::invalid_argument("make_seed: query atom predicate " +
                                pred_of(query_atom).display() + " does not match " +
                                mp.query_pred.display());
  std::vector<TermPtr> args;
  for (int pos : mp.kept_positions(mp.query_pred)) args.push_back(query_atom->args[pos - 1]);
  return make_atom(mp.magic_name_of.at(mp.query_pred), std::move(args));
}

void rebuild(MagicProgram& mp) {
  if (!mp.index_of_rule.empty() || !mp.unfolded_away.empty())
    throw std::logic_error("rebuild: cannot rebuild after indexing/unfolding");

  std::set<Predicate> pruned_set(mp.lexical_pruned.begin(), mp.lexical_pruned.end());

  auto project = [&mp](const TermPtr& atom) -> TermPtr {
    if (!mp.trimmed || !mp.is_magic_atom(atom)) return atom;
    const Predicate& src = mp.source_of_magic.at(atom->name);
    std::vector<TermPtr> args;
    for (int pos : mp.kept_positions(src)) args.push_back(atom->args[pos - 1]);
    return make_atom(atom->name, std::move(args));
  };

  Program out;
  out.next_var = mp.next_var;
  for (const auto& c : mp.base.clauses) {
    if (mp.deleted.count(c.id)) continue;
    if (c.prov.role == ClauseRole::magic && mp.pruned &&
        pruned_set.count(mp.source_of_magic.at(c.head->name)))
      continue;
    Clause r = c;
    if (c.prov.role == ClauseRole::modified && mp.pruned &&
        pruned_set.count(pred_of(c.head)) && !r.body.empty() &&
        mp.is_magic_atom(r.body.front())) {
      r.body.erase(r.body.begin());
    }
    r.head = project(r.head);
    for (auto& b : r.body) b = project(b);
    out.clauses.push_back(std::move(r));
  }
  mp.program = std::move(out);
}

void prune_lexical_magic(MagicProgram& mp) {
  if (mp.mode == CompileMode::lexical_only)
    throw std::invalid_argument(
        "prune_lexical_magic: would remove the only guards of a lexical-only program");
  if (mp.pruned) return;
  mp.pruned = true;
  for (const auto& p : defined_predicates(mp.source)) {
    if (!is_lexical(mp.source, p)) continue;
    mp.lexical_pruned.push_back(p);
    std::vector<int> rule_ids, clause_ids;
    const std::string& mname = mp.magic_name_of.at(p);
    for (const auto& c : mp.base.clauses) {
      if (c.prov.role == ClauseRole::magic && c.head->name == mname &&
          !mp.deleted.count(c.id))
        rule_ids.push_back(c.id);
      if (c.prov.role == ClauseRole::modified && pred_of(c.head) == p)
        clause_ids.push_back(c.id);
    }
    mp.report.push_back("prune: " + p.display() + " lexical; removed guard rules " +
                        join_ints(rule_ids) + "; unguarded clauses " +
                        join_ints(clause_ids));
  }
  rebuild(mp);
}

void retrim(MagicProgram& mp) {
  if (!mp.adornment)
    throw std::logic_error("retrim: no adornment recorded");
  const AbstractQuery& aq = *mp.adornment;

  GroundOracle oracle(mp.source);
  std::set<Predicate> pruned_set(mp.lexical_pruned.begin(), mp.lexical_pruned.end());

  // Active guard rules: in base, not deleted, head predicate not pruned away.
  std::vector<const Clause*> rules;
  for (const auto& c : mp.base.clauses) {
    if (c.prov.role != ClauseRole::magic) continue;
    if (mp.deleted.count(c.id)) continue;
    if (mp.pruned && pruned_set.count(mp.source_of_magic.at(c.head->name))) continue;
    rules.push_back(&c);
  }

  auto forbidden_of = [&mp](const Predicate& p) -> const std::set<int>* {
    auto it = mp.forbidden.find(p);
    return it == mp.forbidden.end() ? nullptr : &it->second;
  };

  std::map<Predicate, std::set<int>> kept_sets;
  {
    std::set<int> seed;
    for (size_t i = 0; i < aq.bound.size(); ++i)
      if (aq.bound[i]) seed.insert(static_cast<int>(i) + 1);
    if (const auto* f = forbidden_of(mp.query_pred))
      for (int pos : *f) seed.erase(pos);
    kept_sets[mp.query_pred] = std::move(seed);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause* m : rules) {
      const TermPtr& guard = m->body.front();
      const Predicate& src_h = mp.source_of_magic.at(guard->name);
      auto hit = kept_sets.find(src_h);
      bool activated =
          (hit != kept_sets.end() && !hit->second.empty()) || src_h.arity == 0;
      if (!activated) continue;

      std::set<int> known;
      if (hit != kept_sets.end())
        for (int pos : hit->second) {
          auto vs = var_set(guard->args[pos - 1]);
          known.insert(vs.begin(), vs.end());
        }
      for (size_t i = 1; i < m->body.size(); ++i) {
        const TermPtr& lit = m->body[i];
        std::set<int> in_l;
        for (size_t q = 0; q < lit->args.size(); ++q)
          if (subset(var_set(lit->args[q]), known))
            in_l.insert(static_cast<int>(q) + 1);
        std::set<int> outs = oracle.out(pred_of(lit), in_l);
        for (int o : outs) {
          auto vs = var_set(lit->args[o - 1]);
          known.insert(vs.begin(), vs.end());
        }
      }

      const Predicate& src_p = mp.source_of_magic.at(m->head->name);
      const auto* forb = forbidden_of(src_p);
      auto& target = kept_sets[src_p];
      for (size_t pos = 0; pos < m->head->args.size(); ++pos) {
        const TermPtr& t = m->head->args[pos];
        // A guard position earns its keep when the call will have a definite
        // value there: a ground term, a variable the earlier literals bind, or
        // (when requested) any structured term even with open variables.
        bool bound = is_ground(t) || (is_var(t) && known.count(t->var_id) > 0) ||
                     (mp.keep_structural && !is_var(t));
        int position = static_cast<int>(pos) + 1;
        if (!bound) continue;
        if (forb && forb->count(position)) continue;
        if (target.insert(position).second) changed = true;
      }
    }
  }

  mp.kept.clear();
  for (const auto& [p, s] : kept_sets)
    mp.kept.emplace(p, std::vector<int>(s.begin(), s.end()));
  mp.trimmed = true;
  rebuild(mp);

  // Report kept positions for every guard predicate still present.
  std::set<std::string> present;
  for (const auto& c : mp.program.clauses) {
    if (mp.is_magic_atom(c.head)) present.insert(c.head->name);
    for (const auto& b : c.body)
      if (mp.is_magic_atom(b)) present.insert(b->name);
  }
  present.insert(mp.magic_name_of.at(mp.query_pred)); // the seed is always fed
  for (const auto& p : mp.magic_order) {
    const std::string& mname = mp.magic_name_of.at(p);
    if (!present.count(mname)) continue;
    mp.report.push_back("trim: " + mname + " keeps " +
                        join_ints(mp.kept_positions(p)) + " of " +
                        std::to_string(p.arity));
  }
}

void adorn_and_trim(MagicProgram& mp, const AbstractQuery& aq, bool keep_structural) {
  if (aq.pred != mp.query_pred)
    throw std::invalid_argument("adorn_and_trim: adornment is for " + aq.pred.display() +
                                ", query predicate is " + mp.query_pred.display());
  if (static_cast<int>(aq.bound.size()) != mp.query_pred.arity)
    throw std::invalid_argument("adorn_and_trim: adornment arity mismatch");
  mp.adornment = aq;
  mp.keep_structural = keep_structural;
  retrim(mp);
}

void delete_clause(MagicProgram& mp, int clause_id) {
  mp.deleted.insert(clause_id);
  rebuild(mp);
}

} // namespace magicforge
