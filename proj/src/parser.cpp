#include "magicforge/parser.hpp"

#include <cctype>
#include <map>
#include <set>

namespace magicforge {

namespace {

enum class Tok { atom, variable, lparen, rparen, comma, dot, lbracket, rbracket, bar, neck, query_neck, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_ws();
    int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Tok::end, "", line, col};
    char c = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      std::string s = ident();
      return {Tok::atom, s, line, col};
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::string s = ident();
      return {Tok::variable, s, line, col};
    }
    switch (c) {
      case '(': advance(); return {Tok::lparen, "(", line, col};
      case ')': advance(); return {Tok::rparen, ")", line, col};
      case ',': advance(); return {Tok::comma, ",", line, col};
      case '.': advance(); return {Tok::dot, ".", line, col};
      case '[': advance(); return {Tok::lbracket, "[", line, col};
      case ']': advance(); return {Tok::rbracket, "]", line, col};
      case '|': advance(); return {Tok::bar, "|", line, col};
      case ':':
        advance();
        if (pos_ < text_.size() && text_[pos_] == '-') {
          advance();
          return {Tok::neck, ":-", line, col};
        }
        throw ParseError(line, col, "expected '-' after ':'");
      case '?':
        advance();
        if (pos_ < text_.size() && text_[pos_] == '-') {
          advance();
          return {Tok::query_neck, "?-", line, col};
        }
        throw ParseError(line, col, "expected '-' after '?'");
      default:
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  void advance() {
    if (pos_ < text_.size()) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string ident() {
    std::string s;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        s += c;
        advance();
      } else {
        break;
      }
    }
    return s;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { shift(); }

  Program parse() {
    Program p;
    int next_id = 1;
    while (cur_.kind != Tok::end) {
      if (cur_.kind == Tok::neck) {
        shift();
        parse_directive(p);
      } else if (cur_.kind == Tok::query_neck) {
        shift();
        clause_vars_.clear();
        TermPtr q = parse_atom_term(p);
        expect(Tok::dot, "expected '.' after query");
        if (p.query) p.warnings.push_back("multiple query lines; the last one wins");
        p.query = q;
        note_arities(q);
      } else {
        clause_vars_.clear();
        Clause c;
        c.id = next_id++;
        c.head = parse_atom_term(p);
        note_arities(c.head);
        if (cur_.kind == Tok::neck) {
          shift();
          for (;;) {
            TermPtr lit = parse_atom_term(p);
            note_arities(lit);
            c.body.push_back(lit);
            if (cur_.kind == Tok::comma) {
              shift();
              continue;
            }
            break;
          }
        }
        expect(Tok::dot, "expected '.' at end of clause");
        c.prov.role = ClauseRole::source;
        p.clauses.push_back(std::move(c));
      }
    }
    p.next_var = next_var_;
    for (const auto& [name, arities] : arities_) {
      if (arities.size() > 1) {
        std::string msg = "predicate " + name + " used with arities";
        for (int a : arities) msg += " " + std::to_string(a);
        p.warnings.push_back(msg);
      }
    }
    return p;
  }

  TermPtr parse_single_atom(int& next_var) {
    next_var_ = next_var;
    Program dummy;
    clause_vars_.clear();
    TermPtr t = parse_atom_term(dummy);
    if (cur_.kind == Tok::dot) shift();
    if (cur_.kind != Tok::end)
      throw ParseError(cur_.line, cur_.col, "trailing input after atom");
    next_var = next_var_;
    return t;
  }

 private:
  void shift() { cur_ = lex_.next(); }

  void expect(Tok k, const std::string& what) {
    if (cur_.kind != k) throw ParseError(cur_.line, cur_.col, what);
    shift();
  }

  void parse_directive(Program& p) {
    if (cur_.kind != Tok::atom || cur_.text != "mode")
      throw ParseError(cur_.line, cur_.col, "unknown directive (expected 'mode')");
    shift();
    clause_vars_.clear();
    Token at = cur_;
    TermPtr m = parse_atom_term(p);
    expect(Tok::dot, "expected '.' after mode directive");
    AbstractQuery aq;
    aq.pred = pred_of(m);
    for (const auto& a : m->args) {
      if (is_const(a) && a->name == "b") aq.bound.push_back(true);
      else if (is_const(a) && a->name == "f") aq.bound.push_back(false);
      else throw ParseError(at.line, at.col, "mode arguments must be b or f");
    }
    if (p.mode) p.warnings.push_back("multiple mode directives; the last one wins");
    p.mode = aq;
  }

  // atom := lowername ( '(' term {',' term} ')' )?
  TermPtr parse_atom_term(Program& p) {
    if (cur_.kind != Tok::atom)
      throw ParseError(cur_.line, cur_.col, "expected predicate name");
    std::string name = cur_.text;
    shift();
    if (cur_.kind != Tok::lparen) return Term::constant(name);
    shift();
    std::vector<TermPtr> args;
    for (;;) {
      args.push_back(parse_term(p));
      if (cur_.kind == Tok::comma) {
        shift();
        continue;
      }
      break;
    }
    expect(Tok::rparen, "expected ')'");
    return Term::compound(name, std::move(args));
  }

  TermPtr parse_term(Program& p) {
    switch (cur_.kind) {
      case Tok::variable: {
        std::string name = cur_.text;
        shift();
        if (name == "_") return Term::var(next_var_++, "");
        auto it = clause_vars_.find(name);
        if (it != clause_vars_.end()) return it->second;
        TermPtr v = Term::var(next_var_++, name);
        clause_vars_.emplace(name, v);
        return v;
      }
      case Tok::atom: {
        std::string name = cur_.text;
        shift();
        if (cur_.kind != Tok::lparen) return Term::constant(name);
        shift();
        std::vector<TermPtr> args;
        for (;;) {
          args.push_back(parse_term(p));
          if (cur_.kind == Tok::comma) {
            shift();
            continue;
          }
          break;
        }
        expect(Tok::rparen, "expected ')'");
        return Term::compound(name, std::move(args));
      }
      case Tok::lbracket: {
        shift();
        if (cur_.kind == Tok::rbracket) {
          shift();
          return nil();
        }
        std::vector<TermPtr> items;
        for (;;) {
          items.push_back(parse_term(p));
          if (cur_.kind == Tok::comma) {
            shift();
            continue;
          }
          break;
        }
        TermPtr tail = nullptr;
        if (cur_.kind == Tok::bar) {
          shift();
          tail = parse_term(p);
        }
        expect(Tok::rbracket, "expected ']'");
        return make_list(items, tail);
      }
      default:
        throw ParseError(cur_.line, cur_.col, "expected a term");
    }
  }

  void note_arities(const TermPtr& atom) {
    arities_[atom->name].insert(static_cast<int>(atom->args.size()));
  }

  Lexer lex_;
  Token cur_{Tok::end, "", 0, 0};
  std::map<std::string, TermPtr> clause_vars_;
  std::map<std::string, std::set<int>> arities_;
  int next_var_ = 0;
};

} // namespace

Program parse_program(const std::string& text) {
  Parser p(text);
  return p.parse();
}

TermPtr parse_atom(const std::string& text, int& next_var) {
  Parser p(text);
  return p.parse_single_atom(next_var);
}

} // namespace magicforge
