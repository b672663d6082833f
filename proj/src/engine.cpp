#include "magicforge/engine.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "magicforge/printer.hpp"

namespace magicforge {

int Chart::live_count() const {
  int n = 0;
  for (const auto& f : facts)
    if (f.live) ++n;
  return n;
}

namespace {

class Engine {
 public:
  Engine(const Program& p, const EvalConfig& cfg) : p_(p), cfg_(cfg) {
    if (cfg_.strategy == Strategy::not_so_naive) cfg_.subsumption = false;
    vg_.next = std::max(p.next_var, max_var_id(p) + 1);
  }

  EvalResult run(const std::vector<TermPtr>& seeds) {
    for (const auto& s : seeds) {
      vg_.next = std::max(vg_.next, max_var_id(s) + 1);
    }
    for (const auto& s : seeds) {
      if (!admit(s, Derivation{true, -1, {}}, 0)) {
        if (exceeded_) return finish(0);
      }
    }
    // Round 1: unit clauses fire once as premise-free rules.
    for (const auto& c : p_.clauses) {
      if (!c.is_unit()) continue;
      TermPtr atom = rename_apart(c.head, vg_);
      admit(atom, Derivation{false, c.id, {}}, 1);
      if (exceeded_) return finish(1);
    }

    int round = 2;
    for (;; ++round) {
      if (round > cfg_.max_iterations) {
        exceeded_ = true;
        reason_ = "max_iterations (" + std::to_string(cfg_.max_iterations) + ") reached";
        break;
      }
      size_t before = chart_.facts.size();
      if (cfg_.strategy == Strategy::naive) {
        run_naive_round(round);
      } else {
        run_delta_round(round);
      }
      if (exceeded_) break;
      if (chart_.facts.size() == before) break; // fixpoint
    }
    return finish(round);
  }

 private:
  EvalResult finish(int rounds) {
    EvalResult r;
    r.chart = std::move(chart_);
    r.exceeded = exceeded_;
    r.reason = reason_;
    r.rounds = rounds;
    return r;
  }

  // Admission policy. Returns true when the fact was stored.
  bool admit(const TermPtr& atom, Derivation how, int round) {
    Predicate pr = pred_of(atom);
    auto& bucket = by_pred_[pr];
    if (cfg_.strategy != Strategy::not_so_naive) {
      for (int id : bucket) {
        const Fact& f = chart_.fact(id);
        if (!f.live) continue;
        if (cfg_.subsumption ? subsumes(f.atom, atom) : variant(f.atom, atom))
          return false;
      }
    }
    if (cfg_.subsumption) {
      for (int id : bucket) {
        Fact& f = chart_.facts[static_cast<size_t>(id) - 1];
        if (f.live && subsumes(atom, f.atom)) f.live = false;
      }
      bucket.erase(std::remove_if(bucket.begin(), bucket.end(),
                                  [this](int id) { return !chart_.fact(id).live; }),
                   bucket.end());
    }
    if (static_cast<int>(chart_.facts.size()) >= cfg_.max_facts) {
      exceeded_ = true;
      reason_ = "max_facts (" + std::to_string(cfg_.max_facts) + ") reached";
      return false;
    }
    Fact f;
    f.id = static_cast<int>(chart_.facts.size()) + 1;
    f.atom = atom;
    f.how = std::move(how);
    f.round = round;
    chart_.facts.push_back(std::move(f));
    bucket.push_back(chart_.facts.back().id);
    return true;
  }

  // All premises drawn from rounds < round.
  void run_naive_round(int round) {
    for (const auto& c : p_.clauses) {
      if (c.is_unit()) continue;
      fire_rule(c, round, /*delta_pos=*/-1, round - 1, round - 1);
      if (exceeded_) return;
    }
  }

  // At least one premise from the delta; literals left of the delta position
  // come from strictly older rounds. The first joining round treats
  // everything admitted so far (seeds and units) as the delta.
  void run_delta_round(int round) {
    int delta_lo = round == 2 ? 0 : round - 1;
    int delta_hi = round - 1;
    for (const auto& c : p_.clauses) {
      if (c.is_unit()) continue;
      for (size_t dp = 0; dp < c.body.size(); ++dp) {
        fire_rule(c, round, static_cast<int>(dp), delta_lo, delta_hi);
        if (exceeded_) return;
      }
    }
  }

  // delta_pos == -1: every literal ranges over rounds <= hi (naive).
  // Otherwise literal j < delta_pos sees rounds < lo, j == delta_pos sees
  // rounds in [lo, hi], j > delta_pos sees rounds <= hi.
  void fire_rule(const Clause& c, int round, int delta_pos, int lo, int hi) {
    std::map<int, TermPtr> mapping;
    std::vector<TermPtr> body;
    body.reserve(c.body.size());
    TermPtr head = rename_apart(c.head, vg_, mapping);
    for (const auto& b : c.body) body.push_back(rename_apart(b, vg_, mapping));

    std::vector<int> premises(c.body.size(), 0);
    join(c, head, body, premises, 0, round, delta_pos, lo, hi, Substitution{});
  }

  void join(const Clause& c, const TermPtr& head, const std::vector<TermPtr>& body,
            std::vector<int>& premises, size_t i, int round, int delta_pos, int lo,
            int hi, const Substitution& sub) {
    if (exceeded_) return;
    if (i == body.size()) {
      admit(magicforge::apply(sub, head), Derivation{false, c.id, premises}, round);
      return;
    }
    auto it = by_pred_.find(pred_of(body[i]));
    if (it == by_pred_.end()) return;
    // Admissions and retractions mutate the bucket mid-join; the snapshot
    // keeps enumeration stable (new facts are ineligible this round anyway).
    const std::vector<int> candidates(it->second.begin(), it->second.end());
    for (int id : candidates) {
      const Fact& f = chart_.fact(id);
      if (!f.live) continue;
      int d = static_cast<int>(i);
      if (delta_pos >= 0) {
        if (d < delta_pos && f.round >= lo) continue;
        if (d == delta_pos && (f.round < lo || f.round > hi)) continue;
        if (d > delta_pos && f.round > hi) continue;
      } else {
        if (f.round > hi) continue;
      }
      Substitution branch = sub;
      // Standardize the premise instance apart: a stored fact shares variable
      // ids with the facts it was derived from (and may fill two slots of the
      // same body), so using its term directly would alias variables across
      // premises and spuriously fail the occurs check.
      TermPtr instance = rename_apart(f.atom, vg_);
      if (!unify_into(branch, body[i], instance, cfg_.occurs_check)) continue;
      premises[i] = id;
      join(c, head, body, premises, i + 1, round, delta_pos, lo, hi, branch);
      if (exceeded_) return;
    }
  }

  const Program& p_;
  EvalConfig cfg_;
  Chart chart_;
  std::map<Predicate, std::vector<int>> by_pred_;
  VarGen vg_;
  bool exceeded_ = false;
  std::string reason_;
};

} // namespace

EvalResult evaluate(const Program& p, const std::vector<TermPtr>& seeds,
                    const EvalConfig& cfg) {
  Engine e(p, cfg);
  return e.run(seeds);
}

std::vector<TermPtr> answers(const Chart& chart, const TermPtr& query) {
  std::vector<TermPtr> out;
  Predicate qp = pred_of(query);
  for (const auto& f : chart.facts) {
    if (!f.live || pred_of(f.atom) != qp) continue;
    VarGen vg;
    vg.next = std::max(max_var_id(query), max_var_id(f.atom)) + 1;
    TermPtr renamed = rename_apart(f.atom, vg);
    auto theta = unify(query, renamed, true);
    if (!theta) continue;
    TermPtr ans = magicforge::apply(*theta, query);
    bool dup = false;
    for (const auto& a : out)
      if (variant(a, ans)) { dup = true; break; }
    if (!dup) out.push_back(ans);
  }
  return out;
}

std::string dump_fact_line(const Chart& chart, int fact_id) {
  const Fact& f = chart.fact(fact_id);
  std::ostringstream out;
  out << f.id << ". " << print_fact(f.atom) << " <- ";
  if (f.how.is_seed) {
    out << "seed";
  } else {
    out << "rule:" << f.how.rule_id << " premises:[";
    for (size_t i = 0; i < f.how.premises.size(); ++i) {
      if (i) out << ',';
      out << f.how.premises[i];
    }
    out << ']';
  }
  out << " round:" << f.round;
  return out.str();
}

std::string dump_chart(const Chart& chart) {
  std::ostringstream out;
  for (const auto& f : chart.facts)
    if (f.live) out << dump_fact_line(chart, f.id) << '\n';
  return out.str();
}

namespace {

void trace_rec(const Chart& chart, int fact_id, int depth, std::ostringstream& out) {
  for (int i = 0; i < depth; ++i) out << "  ";
  out << dump_fact_line(chart, fact_id) << '\n';
  const Fact& f = chart.fact(fact_id);
  for (int premise : f.how.premises) trace_rec(chart, premise, depth + 1, out);
}

} // namespace

std::string trace_fact(const Chart& chart, int fact_id) {
  std::ostringstream out;
  trace_rec(chart, fact_id, 0, out);
  return out.str();
}

} // namespace magicforge
