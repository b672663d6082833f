#include "magicforge/program.hpp"

#include <stdexcept>

namespace magicforge {

const Clause* Program::find_clause(int id) const {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

Predicate pred_of(const TermPtr& atom) {
  return Predicate{atom->name, static_cast<int>(atom->args.size())};
}

bool is_lexical(const Program& p, const Predicate& pred) {
  bool defined = false;
  bool all_units = true;
  for (const auto& c : p.clauses) {
    if (pred_of(c.head) != pred) continue;
    defined = true;
    if (!c.is_unit()) all_units = false;
  }
  if (!defined)
    throw std::invalid_argument("is_lexical: undefined predicate " + pred.display());
  return all_units;
}

std::vector<Predicate> defined_predicates(const Program& p) {
  std::vector<Predicate> out;
  for (const auto& c : p.clauses) {
    Predicate pr = pred_of(c.head);
    bool seen = false;
    for (const auto& q : out)
      if (q == pr) { seen = true; break; }
    if (!seen) out.push_back(pr);
  }
  return out;
}

namespace {

TermPtr clause_as_term(const Clause& c) {
  std::vector<TermPtr> body = c.body;
  return Term::compound(":-", {c.head, make_list(body)});
}

} // namespace

bool clause_variant(const Clause& a, const Clause& b) {
  return variant(clause_as_term(a), clause_as_term(b));
}

int max_var_id(const Program& p) {
  int m = -1;
  for (const auto& c : p.clauses) {
    m = std::max(m, max_var_id(c.head));
    for (const auto& b : c.body) m = std::max(m, max_var_id(b));
  }
  return m;
}

} // namespace magicforge
