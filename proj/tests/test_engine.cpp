#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "magicforge/engine.hpp"
#include "magicforge/parser.hpp"
#include "magicforge/pipeline.hpp"
#include "magicforge/printer.hpp"

using namespace magicforge;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(MF_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Ran {
  MagicProgram mp;
  EvalResult res;
};

Ran run_fixture(const char* file, const char* preset, const char* query_text,
                Strategy st, bool subsumption = true) {
  Program src = parse_program(read_fixture(file));
  REQUIRE(src.mode.has_value());
  std::optional<PipelineSpec> spec = pipeline_preset(preset);
  REQUIRE(spec.has_value());
  MagicProgram mp = run_pipeline(src, src.mode->pred, src.mode, *spec);
  int nv = mp.next_var;
  TermPtr q = parse_atom(query_text, nv);
  EvalConfig cfg;
  cfg.strategy = st;
  cfg.subsumption = subsumption;
  EvalResult res = evaluate(mp.program, {make_seed(mp, q)}, cfg);
  return {std::move(mp), std::move(res)};
}

const char* kGenQuery = "sentence(P0,[],decl(buys(john,a(book),mary)))";
const char* kGenAnswer = "sentence([john,buys,mary,a,book],[],decl(buys(john,a(book),mary)))";
const char* kParseQuery = "sentence([john,buys,mary,a,book],[],S)";

std::vector<TermPtr> live_atoms(const Chart& chart) {
  std::vector<TermPtr> out;
  for (const auto& f : chart.facts)
    if (f.live) out.push_back(f.atom);
  return out;
}

bool variant_set_equal(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  auto covered = [](const std::vector<TermPtr>& xs, const std::vector<TermPtr>& ys) {
    for (const auto& x : xs) {
      bool hit = false;
      for (const auto& y : ys)
        if (variant(x, y)) { hit = true; break; }
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

int magic_fact_count(const Ran& r) {
  int n = 0;
  for (const auto& f : r.res.chart.facts)
    if (f.live && r.mp.is_magic_atom(f.atom)) ++n;
  return n;
}

std::vector<TermPtr> query_answers(const Ran& r, const char* query_text) {
  int nv = 0;
  for (const auto& f : r.res.chart.facts) nv = std::max(nv, max_var_id(f.atom) + 1);
  TermPtr q = parse_atom(query_text, nv);
  return answers(r.res.chart, q);
}

const char* kV1Chart =
R"GOLD(1. magic_sentence(decl(buys(john,a(book),mary))) <- seed round:0
2. det([a|A],A) <- rule:7 premises:[] round:1
3. v([buys|A],A,finite,[B,C,D],buys(D,C,B)) <- rule:8 premises:[] round:1
4. pn([mary|A],A,mary) <- rule:9 premises:[] round:1
5. pn([john|A],A,john) <- rule:10 premises:[] round:1
6. n([book|A],A,book) <- rule:11 premises:[] round:1
7. magic_s(finite,buys(john,a(book),mary)) <- rule:12 premises:[1] round:2
8. magic_vp(finite,buys(john,a(book),mary)) <- rule:13 premises:[7] round:3
9. vp([buys|A],A,finite,[mary,a(book),john],buys(john,a(book),mary)) <- rule:4 premises:[8,3] round:4
10. magic_np(mary) <- rule:16 premises:[8,9] round:5
11. np([mary|A],A,mary) <- rule:5 premises:[10,4] round:6
12. vp([buys,mary|A],A,finite,[a(book),john],buys(john,a(book),mary)) <- rule:3 premises:[8,9,11] round:7
13. magic_np(a(book)) <- rule:16 premises:[8,12] round:8
14. np([a,book|A],A,a(book)) <- rule:6 premises:[13,2,6] round:9
15. vp([buys,mary,a,book|A],A,finite,[john],buys(john,a(book),mary)) <- rule:3 premises:[8,12,14] round:10
16. magic_np(john) <- rule:15 premises:[7,15] round:11
17. np([john|A],A,john) <- rule:5 premises:[16,5] round:12
18. s([john,buys,mary,a,book|A],A,finite,buys(john,a(book),mary)) <- rule:2 premises:[7,15,17] round:13
19. vp([buys,mary,a,book,john|A],A,finite,[],buys(john,a(book),mary)) <- rule:3 premises:[8,15,17] round:13
20. sentence([john,buys,mary,a,book|A],A,decl(buys(john,a(book),mary))) <- rule:1 premises:[1,18] round:14
)GOLD";

const char* kV2Chart =
R"GOLD(1. magic_sentence(decl(buys(john,a(book),mary))) <- seed round:0
2. det([a|A],A) <- rule:7 premises:[] round:1
3. v([buys|A],A,finite,[B,C,D],buys(D,C,B)) <- rule:8 premises:[] round:1
4. pn([mary|A],A,mary) <- rule:9 premises:[] round:1
5. pn([john|A],A,john) <- rule:10 premises:[] round:1
6. n([book|A],A,book) <- rule:11 premises:[] round:1
7. vp([buys|A],A,finite,[mary,a(book),john],buys(john,a(book),mary)) <- rule:4 premises:[1,3] round:2
8. magic_np(mary,index_2) <- rule:16 premises:[1,7] round:3
9. np([mary|A],A,mary,index_2) <- rule:5 premises:[8,4] round:4
10. vp([buys,mary|A],A,finite,[a(book),john],buys(john,a(book),mary)) <- rule:3 premises:[1,7,9] round:5
11. magic_np(a(book),index_2) <- rule:16 premises:[1,10] round:6
12. np([a,book|A],A,a(book),index_2) <- rule:6 premises:[11,2,6] round:7
13. vp([buys,mary,a,book|A],A,finite,[john],buys(john,a(book),mary)) <- rule:3 premises:[1,10,12] round:8
14. magic_np(john,index_1) <- rule:15 premises:[1,13] round:9
15. magic_np(john,index_2) <- rule:16 premises:[1,13] round:9
16. np([john|A],A,john,index_1) <- rule:5 premises:[14,5] round:10
17. np([john|A],A,john,index_2) <- rule:5 premises:[15,5] round:10
18. s([john,buys,mary,a,book|A],A,finite,buys(john,a(book),mary)) <- rule:2 premises:[1,13,16] round:11
19. vp([buys,mary,a,book,john|A],A,finite,[],buys(john,a(book),mary)) <- rule:3 premises:[1,13,17] round:11
20. sentence([john,buys,mary,a,book|A],A,decl(buys(john,a(book),mary))) <- rule:1 premises:[1,18] round:12
)GOLD";

} // namespace

TEST_CASE("guarded generation derives the worked example exactly") {
  Ran r = run_fixture("fig1.gr", "v1", kGenQuery, Strategy::semi_naive);
  REQUIRE(!r.res.exceeded);
  CHECK(dump_chart(r.res.chart) == kV1Chart);
  CHECK(magic_fact_count(r) == 6);

  std::vector<TermPtr> ans = query_answers(r, kGenQuery);
  REQUIRE(ans.size() == 1);
  CHECK(print_fact(ans[0]) == kGenAnswer);
}

TEST_CASE("optimized generation derives the same answer with fewer guards") {
  Ran r = run_fixture("fig1.gr", "v2", kGenQuery, Strategy::semi_naive);
  REQUIRE(!r.res.exceeded);
  CHECK(dump_chart(r.res.chart) == kV2Chart);
  CHECK(magic_fact_count(r) == 5);

  std::vector<TermPtr> ans = query_answers(r, kGenQuery);
  REQUIRE(ans.size() == 1);
  CHECK(print_fact(ans[0]) == kGenAnswer);

  // The optimized program has no duplicate derivations, so storing every
  // derivation without variant checking reaches the identical chart.
  Ran nsn = run_fixture("fig1.gr", "v2", kGenQuery, Strategy::not_so_naive);
  REQUIRE(!nsn.res.exceeded);
  CHECK(dump_chart(nsn.res.chart) == dump_chart(r.res.chart));
}

TEST_CASE("naive evaluation reaches the same fact set as semi-naive") {
  Ran sn = run_fixture("fig1.gr", "v1", kGenQuery, Strategy::semi_naive);
  Ran nv = run_fixture("fig1.gr", "v1", kGenQuery, Strategy::naive);
  REQUIRE(!sn.res.exceeded);
  REQUIRE(!nv.res.exceeded);
  CHECK(variant_set_equal(live_atoms(sn.res.chart), live_atoms(nv.res.chart)));
}

TEST_CASE("parsing direction yields the unique semantics") {
  Ran r = run_fixture("fig1-parse.gr", "v2", kParseQuery, Strategy::not_so_naive);
  REQUIRE(!r.res.exceeded);
  CHECK(r.res.chart.facts.size() == 19);

  std::vector<TermPtr> ans = query_answers(r, kParseQuery);
  REQUIRE(ans.size() == 1);
  CHECK(print_fact(ans[0]) == kGenAnswer);

  // Oracle: the unguarded grammar saturates (bottom-up, no seed needed) and
  // must report the same unique reading.
  Program src = parse_program(read_fixture("fig1-parse.gr"));
  EvalConfig cfg;
  cfg.strategy = Strategy::naive;
  EvalResult raw = evaluate(src, {}, cfg);
  REQUIRE(!raw.exceeded);
  CHECK(raw.chart.live_count() == 102);
  int nv = src.next_var;
  TermPtr q = parse_atom(kParseQuery, nv);
  std::vector<TermPtr> oracle = answers(raw.chart, q);
  REQUIRE(oracle.size() == 1);
  CHECK(print_fact(oracle[0]) == kGenAnswer);
}

TEST_CASE("derivation traces expand premises depth-first") {
  Ran r = run_fixture("fig1.gr", "v1", kGenQuery, Strategy::semi_naive);
  std::string trace = trace_fact(r.res.chart, 18);

  std::vector<std::string> lines;
  std::istringstream ss(trace);
  for (std::string line; std::getline(ss, line);) lines.push_back(line);

  // Root, then its three premises (7, 15, 17) at increasing indentation;
  // shared sub-derivations are expanded at every use site.
  REQUIRE(lines.size() == 110);
  CHECK(trace.rfind(dump_fact_line(r.res.chart, 18) + "\n", 0) == 0);
  CHECK(lines[1] == "  " + dump_fact_line(r.res.chart, 7));
  CHECK(lines[2] == "    " + dump_fact_line(r.res.chart, 1));
  CHECK(lines[3] == "  " + dump_fact_line(r.res.chart, 15));
  CHECK(lines.back() == "    " + dump_fact_line(r.res.chart, 5));

  // A seed fact traces as a single line.
  CHECK(trace_fact(r.res.chart, 1) == dump_fact_line(r.res.chart, 1) + "\n");
}

TEST_CASE("subsumption retracts facts covered by a newer general fact") {
  Program p = parse_program("p(X) :- q(X).\nq(a).\nq(Y).\n");
  EvalConfig cfg;
  cfg.strategy = Strategy::semi_naive;
  cfg.subsumption = true;
  EvalResult res = evaluate(p, {}, cfg);
  REQUIRE(!res.exceeded);
  REQUIRE(res.chart.facts.size() == 3);
  CHECK(!res.chart.fact(1).live); // q(a), retracted by q(Y)
  CHECK(res.chart.live_count() == 2);

  // Without subsumption both q facts survive and p(a) is derived too.
  cfg.subsumption = false;
  EvalResult res2 = evaluate(p, {}, cfg);
  CHECK(res2.chart.live_count() == 4);
}

TEST_CASE("resource limits stop divergent runs with a reason") {
  Program p = parse_program("p(a).\np(X) :- p(X).\n");

  EvalConfig cfg;
  cfg.strategy = Strategy::not_so_naive;
  cfg.max_iterations = 5;
  EvalResult res = evaluate(p, {}, cfg);
  CHECK(res.exceeded);
  CHECK(res.reason == "max_iterations (5) reached");

  cfg.max_iterations = 1000;
  cfg.max_facts = 50;
  EvalResult res2 = evaluate(p, {}, cfg);
  CHECK(res2.exceeded);
  CHECK(res2.reason == "max_facts (50) reached");

  // Variant checking makes the same program terminate immediately.
  EvalConfig sn;
  sn.strategy = Strategy::semi_naive;
  EvalResult res3 = evaluate(p, {}, sn);
  CHECK(!res3.exceeded);
  CHECK(res3.chart.live_count() == 1);
}

TEST_CASE("evaluation is deterministic") {
  Ran a = run_fixture("fig1.gr", "v2", kGenQuery, Strategy::semi_naive);
  Ran b = run_fixture("fig1.gr", "v2", kGenQuery, Strategy::semi_naive);
  CHECK(dump_chart(a.res.chart) == dump_chart(b.res.chart));
}
