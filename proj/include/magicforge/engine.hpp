#pragma once

#include <string>
#include <vector>

#include "magicforge/program.hpp"

namespace magicforge {

// naive: every round recomputes all rules over the full fact set.
// semi_naive: every firing must use at least one fact from the previous
// round's delta (literals left of the delta position see older facts only).
// not_so_naive: semi_naive rounds, but admission stores every derivation
// without variant or subsumption checking.
enum class Strategy { naive, semi_naive, not_so_naive };

struct EvalConfig {
  Strategy strategy = Strategy::semi_naive;
  bool subsumption = true;  // ignored (off) under not_so_naive
  bool occurs_check = true;
  int max_iterations = 1000;
  int max_facts = 100000;
};

struct Derivation {
  bool is_seed = false;
  int rule_id = -1;
  std::vector<int> premises; // fact ids in body-literal order
};

struct Fact {
  int id = 0;
  TermPtr atom;
  Derivation how;
  int round = 0;
  bool live = true; // false once retracted by a more general newcomer
};

struct Chart {
  std::vector<Fact> facts; // ids are 1-based positions; retracted facts stay
  const Fact& fact(int id) const { return facts[static_cast<size_t>(id) - 1]; }
  int live_count() const;
};

struct EvalResult {
  Chart chart;
  bool exceeded = false;
  std::string reason; // which resource ran out
  int rounds = 0;
};

// Bottom-up saturation. Seeds enter at round 0, unit clauses fire at round 1,
// joining rounds follow. Conclusions are admitted immediately, so within a
// round later rules see earlier admissions when checking for duplicates, but
// premises always come from earlier rounds. Deterministic: clauses in program
// order, delta position ascending, candidate facts in id order.
EvalResult evaluate(const Program& p, const std::vector<TermPtr>& seeds,
                    const EvalConfig& cfg);

// Live facts unifying with `query`, reported as the instantiated query,
// deduplicated up to variants, in fact-id order.
std::vector<TermPtr> answers(const Chart& chart, const TermPtr& query);

// One line per live fact:
//   <id>. <atom> <- rule:<rule-id> premises:[<ids>] round:<n>
//   <id>. <atom> <- seed round:0
// Variables print as A..Z, A1..Z1, ... per fact in first-occurrence order.
std::string dump_chart(const Chart& chart);
std::string dump_fact_line(const Chart& chart, int fact_id);

// Derivation tree of one fact, two-space indentation per premise level.
std::string trace_fact(const Chart& chart, int fact_id);

} // namespace magicforge
