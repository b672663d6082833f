#pragma once

#include <stdexcept>
#include <string>

#include "magicforge/program.hpp"

namespace magicforge {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

// Parses a full program text: clauses `H.` / `H :- B1, ..., Bn.`,
// mode directives `:- mode p(b,f,...).`, and query lines `?- p(...).`.
// `%` starts a comment running to end of line. Variables are scoped per
// clause; `_` is a fresh variable at each occurrence. Inconsistent arities
// produce warnings on the program, not errors.
Program parse_program(const std::string& text);

// Parses a single atom (used for --query/--mode command-line values).
// Fresh variable ids start at `next_var`, which is advanced.
TermPtr parse_atom(const std::string& text, int& next_var);

} // namespace magicforge
