#pragma once

#include <string>

#include "magicforge/program.hpp"

namespace magicforge {

// Names the variables of one printing scope (a clause or a fact).
// With hints on, source names are reused when unambiguous; otherwise —
// and always with hints off — names are generated as A..Z, A1..Z1, ...
// in first-occurrence order.
class VarNamer {
 public:
  explicit VarNamer(bool use_hints) : use_hints_(use_hints) {}
  void scan(const TermPtr& t);
  std::string name_of(int var_id) const;

 private:
  bool use_hints_;
  std::map<int, std::string> names_;
  std::set<std::string> taken_;
  int gen_counter_ = 0;
};

std::string print_term(const TermPtr& t, const VarNamer& namer);

// Convenience: a term printed standalone with generated variable names.
std::string print_fact(const TermPtr& t);

std::string print_clause(const Clause& c, bool use_hints = true);
std::string print_program(const Program& p, bool use_hints = true);

} // namespace magicforge
