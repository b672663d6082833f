#include <stdexcept>

#include "doctest.h"
#include "magicforge/magic.hpp"
#include "magicforge/parser.hpp"
#include "magicforge/printer.hpp"

using namespace magicforge;

namespace {

// Ten-clause generation grammar used as the compile golden throughout.
const char* kGen = R"(
sentence(P0,P,decl(S)) :- s(P0,P,finite,S).
s(P0,P,VForm,SSem) :- vp(P1,P,VForm,[CSem],SSem), np(P0,P1,CSem).
vp(P0,P,VForm,Args,SSem) :- vp(P0,P1,VForm,[CSem|Args],SSem), np(P1,P,CSem).
vp(P0,P,VForm,Args,SSem) :- v(P0,P,VForm,Args,SSem).
np(P0,P,Sem) :- pn(P0,P,Sem).
np(P0,P,a(NSem)) :- det(P0,P1), n(P1,P,NSem).
det([a|P],P).
v([buys|P],P,finite,[IObj,Obj,Subj],buys(Subj,Obj,IObj)).
pn([mary|P],P,mary).
n([book|P],P,book).
)";

// Same grammar with the sentence-level rule reordered subject-first, the
// natural order when the word string is the bound argument.
const char* kParse = R"(
sentence(P0,P,decl(S)) :- s(P0,P,finite,S).
s(P0,P,VForm,SSem) :- np(P0,P1,CSem), vp(P1,P,VForm,[CSem],SSem).
vp(P0,P,VForm,Args,SSem) :- vp(P0,P1,VForm,[CSem|Args],SSem), np(P1,P,CSem).
vp(P0,P,VForm,Args,SSem) :- v(P0,P,VForm,Args,SSem).
np(P0,P,Sem) :- pn(P0,P,Sem).
np(P0,P,a(NSem)) :- det(P0,P1), n(P1,P,NSem).
det([a|P],P).
v([buys|P],P,finite,[IObj,Obj,Subj],buys(Subj,Obj,IObj)).
pn([mary|P],P,mary).
n([book|P],P,book).
)";

const Predicate kSentence{"sentence", 3};

AbstractQuery gen_mode() { return AbstractQuery{kSentence, {false, false, true}}; }
AbstractQuery parse_mode() { return AbstractQuery{kSentence, {true, true, false}}; }

void check_programs_equal(const Program& got, const std::string& expected_text) {
  Program expected = parse_program(expected_text);
  REQUIRE(got.clauses.size() == expected.clauses.size());
  for (size_t i = 0; i < got.clauses.size(); ++i) {
    INFO("clause ", i + 1, ": got ", print_clause(got.clauses[i]), " expected ",
         print_clause(expected.clauses[i]));
    CHECK(clause_variant(got.clauses[i], expected.clauses[i]));
  }
}

std::vector<int> kept_of(const MagicProgram& mp, const std::string& name, int arity) {
  return mp.kept_positions(Predicate{name, arity});
}

} // namespace

TEST_CASE("guard transform guards every clause and groups guard rules") {
  Program src = parse_program(kGen);
  MagicProgram mp = magic_transform(src, kSentence);

  // 10 modified clauses + 9 guard rules (one per body literal occurrence,
  // grouped by guarded predicate in first-use order).
  REQUIRE(mp.program.clauses.size() == 19);
  for (int i = 0; i < 10; ++i) {
    const Clause& c = mp.program.clauses[static_cast<size_t>(i)];
    CHECK(c.prov.role == ClauseRole::modified);
    CHECK(c.id == i + 1);
    REQUIRE(!c.body.empty());
    CHECK(mp.is_magic_atom(c.body.front()));
  }
  // Guard-rule ids continue after the source ids; groups follow first use:
  // s, then vp (two rules), np (two rules), then the lexical predicates.
  const std::vector<std::pair<int, std::string>> expect = {
      {11, "magic_s"},  {12, "magic_vp"}, {13, "magic_vp"},
      {14, "magic_np"}, {15, "magic_np"}, {16, "magic_v"},
      {17, "magic_pn"}, {18, "magic_det"}, {19, "magic_n"}};
  for (size_t i = 0; i < expect.size(); ++i) {
    const Clause& c = mp.program.clauses[10 + i];
    CHECK(c.prov.role == ClauseRole::magic);
    CHECK(c.id == expect[i].first);
    CHECK(c.head->name == expect[i].second);
  }
  // Provenance: guard rule 13 derives the guard for clause 3's first literal,
  // and its body starts with clause 3's own guard.
  const Clause* r13 = mp.program.find_clause(13);
  REQUIRE(r13 != nullptr);
  CHECK(r13->prov.source_clause == 3);
  CHECK(r13->prov.literal_index == 1);
  CHECK(r13->body.front()->name == "magic_vp");
  // Guard rule 15 (second np use, clause 3 literal 2) carries the earlier
  // body literal as context.
  const Clause* r15 = mp.program.find_clause(15);
  REQUIRE(r15 != nullptr);
  CHECK(r15->prov.source_clause == 3);
  CHECK(r15->prov.literal_index == 2);
  REQUIRE(r15->body.size() == 2);
  CHECK(r15->body[0]->name == "magic_vp");
  CHECK(pred_of(r15->body[1]).display() == "vp/5");
}

TEST_CASE("generation compile golden: prune + trim") {
  Program src = parse_program(kGen);
  MagicProgram mp = magic_transform(src, kSentence);
  prune_lexical_magic(mp);
  adorn_and_trim(mp, gen_mode());

  CHECK(kept_of(mp, "sentence", 3) == std::vector<int>{3});
  CHECK(kept_of(mp, "s", 4) == std::vector<int>{3, 4});
  CHECK(kept_of(mp, "vp", 5) == std::vector<int>{3, 5});
  CHECK(kept_of(mp, "np", 3) == std::vector<int>{3});

  check_programs_equal(mp.program, R"(
sentence(P0,P,decl(S)) :- magic_sentence(decl(S)), s(P0,P,finite,S).
s(P0,P,VForm,SSem) :- magic_s(VForm,SSem), vp(P1,P,VForm,[CSem],SSem), np(P0,P1,CSem).
vp(P0,P,VForm,Args,SSem) :- magic_vp(VForm,SSem), vp(P0,P1,VForm,[CSem|Args],SSem), np(P1,P,CSem).
vp(P0,P,VForm,Args,SSem) :- magic_vp(VForm,SSem), v(P0,P,VForm,Args,SSem).
np(P0,P,Sem) :- magic_np(Sem), pn(P0,P,Sem).
np(P0,P,a(NSem)) :- magic_np(a(NSem)), det(P0,P1), n(P1,P,NSem).
det([a|P],P).
v([buys|P],P,finite,[IObj,Obj,Subj],buys(Subj,Obj,IObj)).
pn([mary|P],P,mary).
n([book|P],P,book).
magic_s(finite,S) :- magic_sentence(decl(S)).
magic_vp(VForm,SSem) :- magic_s(VForm,SSem).
magic_vp(VForm,SSem) :- magic_vp(VForm,SSem).
magic_np(CSem) :- magic_s(VForm,SSem), vp(P1,P,VForm,[CSem],SSem).
magic_np(CSem) :- magic_vp(VForm,SSem), vp(P0,P1,VForm,[CSem|Args],SSem).
)");
}

TEST_CASE("keep_structural also keeps structured argument positions") {
  Program src = parse_program(kGen);
  MagicProgram mp = magic_transform(src, kSentence);
  prune_lexical_magic(mp);
  adorn_and_trim(mp, gen_mode(), /*keep_structural=*/true);
  CHECK(kept_of(mp, "vp", 5) == std::vector<int>{3, 4, 5});
  CHECK(kept_of(mp, "np", 3) == std::vector<int>{3});
}

TEST_CASE("parse-direction trim keeps string positions") {
  Program src = parse_program(kParse);
  MagicProgram mp = magic_transform(src, kSentence);
  prune_lexical_magic(mp);
  adorn_and_trim(mp, parse_mode());
  CHECK(kept_of(mp, "sentence", 3) == std::vector<int>{1, 2});
  CHECK(kept_of(mp, "s", 4) == std::vector<int>{1, 2, 3});
  CHECK(kept_of(mp, "vp", 5) == std::vector<int>{1, 2, 3});
  CHECK(kept_of(mp, "np", 3) == std::vector<int>{1, 2});
}

TEST_CASE("all-free query trims every guard to a proposition") {
  Program src = parse_program(kGen);
  MagicProgram mp = magic_transform(src, kSentence);
  prune_lexical_magic(mp);
  adorn_and_trim(mp, AbstractQuery{kSentence, {false, false, false}});
  CHECK(kept_of(mp, "sentence", 3).empty());
  CHECK(kept_of(mp, "s", 4).empty());
  CHECK(kept_of(mp, "vp", 5).empty());
  CHECK(kept_of(mp, "np", 3).empty());
  for (const auto& c : mp.program.clauses)
    if (c.prov.role == ClauseRole::magic) {
      CHECK(is_const(c.head));
      CHECK(is_const(c.body.front()));
    }
  int nv = 100;
  TermPtr q = parse_atom("sentence(A,B,C)", nv);
  TermPtr seed = make_seed(mp, q);
  CHECK(print_fact(seed) == "magic_sentence");
}

TEST_CASE("make_seed projects the query onto kept positions") {
  Program src = parse_program(kGen);
  MagicProgram mp = magic_transform(src, kSentence);
  prune_lexical_magic(mp);
  adorn_and_trim(mp, gen_mode());
  int nv = 100;
  TermPtr q = parse_atom("sentence(P0,[],decl(buys(john,a(book),mary)))", nv);
  TermPtr seed = make_seed(mp, q);
  CHECK(print_fact(seed) == "magic_sentence(decl(buys(john,a(book),mary)))");

  TermPtr wrong = parse_atom("s(A,B,C,D)", nv);
  CHECK_THROWS_AS(make_seed(mp, wrong), std::invalid_argument);
}

TEST_CASE("lexical-only transform guards just the lexicon") {
  Program src = parse_program(kGen);
  MagicProgram mp = lexical_only_transform(src, kSentence);
  // Rule clauses stay unguarded; unit (lexical) clauses gain guards.
  for (const auto& c : mp.program.clauses) {
    if (c.prov.role != ClauseRole::modified) continue;
    bool lexical_head = is_lexical(src, pred_of(c.head));
    bool guarded = !c.body.empty() && mp.is_magic_atom(c.body.front());
    CHECK(guarded == lexical_head);
  }
  // All guard rules are still generated (the guards must be derivable).
  int magic_rules = 0;
  for (const auto& c : mp.program.clauses)
    if (c.prov.role == ClauseRole::magic) ++magic_rules;
  CHECK(magic_rules == 9);
  CHECK_THROWS_AS(prune_lexical_magic(mp), std::invalid_argument);
}

TEST_CASE("pruning is idempotent and reported") {
  Program src = parse_program(kGen);
  MagicProgram mp = magic_transform(src, kSentence);
  prune_lexical_magic(mp);
  size_t n = mp.program.clauses.size();
  size_t reports = mp.report.size();
  prune_lexical_magic(mp);
  CHECK(mp.program.clauses.size() == n);
  CHECK(mp.report.size() == reports);
}

TEST_CASE("adornment validation") {
  Program src = parse_program(kGen);
  MagicProgram mp = magic_transform(src, kSentence);
  CHECK_THROWS_AS(adorn_and_trim(mp, AbstractQuery{Predicate{"s", 4}, {true, true, true, true}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(adorn_and_trim(mp, AbstractQuery{kSentence, {true}}), std::invalid_argument);
}

TEST_CASE("guard names avoid collisions with existing predicates") {
  Program src = parse_program("p(X) :- magic_p(X).\nmagic_p(a).\n");
  MagicProgram mp = magic_transform(src, Predicate{"p", 1});
  const std::string& name = mp.magic_name_of.at(Predicate{"p", 1});
  CHECK(name != "magic_p");
  CHECK(name.rfind("magic_p", 0) == 0);
}
