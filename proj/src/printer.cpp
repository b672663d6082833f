#include "magicforge/printer.hpp"

#include <sstream>

namespace magicforge {

namespace {

std::string generated_name(int i) {
  std::string s(1, static_cast<char>('A' + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

} // namespace

void VarNamer::scan(const TermPtr& t) {
  if (is_var(t)) {
    if (names_.count(t->var_id)) return;
    std::string name;
    if (use_hints_ && !t->name.empty() && !taken_.count(t->name)) {
      name = t->name;
    } else {
      do {
        name = generated_name(gen_counter_++);
      } while (taken_.count(name));
    }
    names_.emplace(t->var_id, name);
    taken_.insert(name);
    return;
  }
  for (const auto& a : t->args) scan(a);
}

std::string VarNamer::name_of(int var_id) const {
  auto it = names_.find(var_id);
  if (it != names_.end()) return it->second;
  return "_G" + std::to_string(var_id); // unscanned variable; should not happen
}

namespace {

void print_rec(std::ostringstream& out, const TermPtr& t, const VarNamer& namer) {
  if (is_var(t)) {
    out << namer.name_of(t->var_id);
    return;
  }
  if (is_cons(t)) {
    out << '[';
    TermPtr cur = t;
    bool first = true;
    while (is_cons(cur)) {
      if (!first) out << ',';
      print_rec(out, cur->args[0], namer);
      first = false;
      cur = cur->args[1];
    }
    if (!is_nil(cur)) {
      out << '|';
      print_rec(out, cur, namer);
    }
    out << ']';
    return;
  }
  out << t->name;
  if (is_compound(t)) {
    out << '(';
    for (size_t i = 0; i < t->args.size(); ++i) {
      if (i) out << ',';
      print_rec(out, t->args[i], namer);
    }
    out << ')';
  }
}

} // namespace

std::string print_term(const TermPtr& t, const VarNamer& namer) {
  std::ostringstream out;
  print_rec(out, t, namer);
  return out.str();
}

std::string print_fact(const TermPtr& t) {
  VarNamer namer(false);
  namer.scan(t);
  return print_term(t, namer);
}

std::string print_clause(const Clause& c, bool use_hints) {
  VarNamer namer(use_hints);
  namer.scan(c.head);
  for (const auto& b : c.body) namer.scan(b);
  std::ostringstream out;
  out << print_term(c.head, namer);
  if (!c.body.empty()) {
    out << " :- ";
    for (size_t i = 0; i < c.body.size(); ++i) {
      if (i) out << ", ";
      out << print_term(c.body[i], namer);
    }
  }
  out << '.';
  return out.str();
}

std::string print_program(const Program& p, bool use_hints) {
  std::ostringstream out;
  for (const auto& c : p.clauses) out << print_clause(c, use_hints) << '\n';
  return out.str();
}

} // namespace magicforge
