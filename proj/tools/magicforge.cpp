// Command-line front end: compile grammars with goal-directed guard
// predicates, evaluate them bottom-up, and diagnose duplicate derivations.
//
// Exit codes: 0 success, 1 grammar parse error, 2 invalid options or
// configuration, 3 resource limit reached, 4 duplicate derivations found
// (diagnose only).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magicforge/engine.hpp"
#include "magicforge/parser.hpp"
#include "magicforge/pipeline.hpp"
#include "magicforge/printer.hpp"

namespace {

using namespace magicforge;

constexpr int kOk = 0;
constexpr int kParseError = 1;
constexpr int kBadOptions = 2;
constexpr int kResourceLimit = 3;
constexpr int kDuplicates = 4;

struct CommonOpts {
  std::string grammar;
  std::string query;
  std::string mode;
  std::string pipeline = "v1";
  std::string opt;
  std::string compile_mode = "full";
  bool keep_structural = false;
  int depth = 3;
  std::string index_scope = "overlapping";
  std::string print;
};

struct EngineOpts {
  std::string strategy = "semi-naive";
  std::string subsumption = "on";
  std::string occurs_check = "on";
  int max_iter = 1000;
  long max_facts = 100000;
  int trace_id = -1;
};

void add_common(CLI::App* cmd, CommonOpts& co) {
  cmd->add_option("grammar", co.grammar, "grammar file")->required();
  cmd->add_option("--query", co.query, "query atom, e.g. 'sentence(P,[],decl(X))'");
  cmd->add_option("--mode", co.mode, "query mode, e.g. 'sentence(f,f,b)'");
  cmd->add_option("--pipeline", co.pipeline,
                  "preset: v1, v1-no-cycle-removal, v2, raw (default v1)");
  cmd->add_option("--opt", co.opt,
                  "comma list overriding the preset: prune_lexical,trim,cycles,index,unfold");
  cmd->add_option("--compile-mode", co.compile_mode, "full or lexical (default full)");
  cmd->add_flag("--keep-structural", co.keep_structural,
                "also keep guard positions holding non-variable structure");
  cmd->add_option("--depth", co.depth, "term-depth bound for the guard analysis (default 3)");
  cmd->add_option("--index-scope", co.index_scope, "overlapping or all (default overlapping)");
  cmd->add_option("--print", co.print, "comma list of sections: report,program,chart,answers");
}

void add_engine(CLI::App* cmd, EngineOpts& eo, bool with_strategy) {
  if (with_strategy) {
    cmd->add_option("--strategy", eo.strategy,
                    "naive, semi-naive, or not-so-naive (default semi-naive)");
    cmd->add_option("--subsumption", eo.subsumption, "on or off (default on)");
  }
  cmd->add_option("--occurs-check", eo.occurs_check, "on or off (default on)");
  cmd->add_option("--max-iter", eo.max_iter, "round limit (default 1000)");
  cmd->add_option("--max-facts", eo.max_facts, "stored-fact limit (default 100000)");
  if (with_strategy)
    cmd->add_option("--trace", eo.trace_id, "print the derivation tree of this fact id");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

int fail(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kBadOptions;
}

// Everything the three subcommands share: the parsed grammar, the resolved
// query/adornment, and the validated pass selection.
struct Session {
  Program program;
  PipelineSpec spec;
  std::optional<TermPtr> query_atom;
  std::optional<AbstractQuery> adornment;
  std::optional<Predicate> query_pred;
  std::vector<std::string> sections;
};

int prepare(const CommonOpts& co, const std::string& default_print, Session& s) {
  std::ifstream in(co.grammar);
  if (!in) return fail("cannot read " + co.grammar);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    s.program = parse_program(buf.str());
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.what() << "\n";
    return kParseError;
  }
  for (const auto& w : s.program.warnings) std::cerr << "% warning: " << w << "\n";

  auto preset = pipeline_preset(co.pipeline);
  if (!preset) return fail("unknown pipeline '" + co.pipeline + "'");
  s.spec = *preset;
  if (!co.opt.empty()) {
    s.spec.raw = false;
    s.spec.prune = s.spec.trim = s.spec.cycles = s.spec.index = s.spec.unfold = false;
    for (const auto& tok : split_csv(co.opt)) {
      if (tok == "prune_lexical") s.spec.prune = true;
      else if (tok == "trim") s.spec.trim = true;
      else if (tok == "cycles") s.spec.cycles = true;
      else if (tok == "index") s.spec.index = true;
      else if (tok == "unfold") s.spec.unfold = true;
      else return fail("unknown --opt token '" + tok + "'");
    }
  }
  if (co.compile_mode == "full") s.spec.mode = CompileMode::full_magic;
  else if (co.compile_mode == "lexical") s.spec.mode = CompileMode::lexical_only;
  else return fail("unknown --compile-mode '" + co.compile_mode + "'");
  s.spec.keep_structural = co.keep_structural;
  s.spec.depth = co.depth;
  if (co.index_scope == "overlapping") s.spec.index_scope = IndexScope::overlapping_only;
  else if (co.index_scope == "all") s.spec.index_scope = IndexScope::all;
  else return fail("unknown --index-scope '" + co.index_scope + "'");

  if (!co.query.empty()) {
    try {
      int nv = s.program.next_var;
      s.query_atom = parse_atom(co.query, nv);
    } catch (const ParseError& e) {
      return fail(std::string("bad --query: ") + e.what());
    }
  } else if (s.program.query) {
    s.query_atom = *s.program.query;
  }

  if (!co.mode.empty()) {
    try {
      int nv = 0;
      TermPtr m = parse_atom(co.mode, nv);
      AbstractQuery aq;
      aq.pred = pred_of(m);
      for (const auto& a : m->args) {
        if (is_const(a) && a->name == "b") aq.bound.push_back(true);
        else if (is_const(a) && a->name == "f") aq.bound.push_back(false);
        else return fail("--mode arguments must be b or f");
      }
      s.adornment = aq;
    } catch (const ParseError& e) {
      return fail(std::string("bad --mode: ") + e.what());
    }
  } else if (s.program.mode) {
    s.adornment = s.program.mode;
  } else if (s.query_atom) {
    AbstractQuery aq;
    aq.pred = pred_of(*s.query_atom);
    for (const auto& a : (*s.query_atom)->args) aq.bound.push_back(is_ground(a));
    s.adornment = aq;
  }

  if (s.query_atom) s.query_pred = pred_of(*s.query_atom);
  else if (s.adornment) s.query_pred = s.adornment->pred;
  if (s.query_atom && s.adornment && !(pred_of(*s.query_atom) == s.adornment->pred))
    return fail("query atom and mode name different predicates");

  if (!s.spec.raw) {
    if (!s.query_pred) return fail("a --query atom or mode is required");
    bool defined = false;
    for (const auto& p : defined_predicates(s.program))
      if (p == *s.query_pred) defined = true;
    if (!defined)
      return fail("query predicate " + s.query_pred->display() + " is not defined");
  }
  if (auto err = validate_pipeline(s.spec, s.adornment.has_value())) return fail(*err);

  s.sections = split_csv(co.print.empty() ? default_print : co.print);
  for (const auto& sec : s.sections)
    if (sec != "report" && sec != "program" && sec != "chart" && sec != "answers")
      return fail("unknown --print section '" + sec + "'");
  return kOk;
}

bool wants(const Session& s, const std::string& sec) {
  for (const auto& x : s.sections)
    if (x == sec) return true;
  return false;
}

void print_report(const MagicProgram& mp) {
  std::cout << "% report\n";
  for (const auto& line : mp.report) std::cout << "% " << line << "\n";
}

void print_program_section(const Program& p) {
  std::cout << "% program\n";
  for (const auto& c : p.clauses)
    std::cout << print_clause(c) << "  % r" << c.id << "\n";
}

int parse_engine_opts(const EngineOpts& eo, EvalConfig& cfg) {
  if (eo.strategy == "naive") cfg.strategy = Strategy::naive;
  else if (eo.strategy == "semi-naive" || eo.strategy == "semi_naive")
    cfg.strategy = Strategy::semi_naive;
  else if (eo.strategy == "not-so-naive" || eo.strategy == "not_so_naive" ||
           eo.strategy == "nsn")
    cfg.strategy = Strategy::not_so_naive;
  else return fail("unknown --strategy '" + eo.strategy + "'");
  if (eo.subsumption == "on") cfg.subsumption = true;
  else if (eo.subsumption == "off") cfg.subsumption = false;
  else return fail("--subsumption must be on or off");
  if (eo.occurs_check == "on") cfg.occurs_check = true;
  else if (eo.occurs_check == "off") cfg.occurs_check = false;
  else return fail("--occurs-check must be on or off");
  if (eo.max_iter < 1) return fail("--max-iter must be positive");
  if (eo.max_facts < 1) return fail("--max-facts must be positive");
  cfg.max_iterations = eo.max_iter;
  cfg.max_facts = static_cast<int>(eo.max_facts);
  return kOk;
}

int do_compile(const CommonOpts& co) {
  Session s;
  if (int rc = prepare(co, "program", s); rc != kOk) return rc;
  if (s.spec.raw) return fail("the raw pipeline has nothing to compile");
  MagicProgram mp = run_pipeline(s.program, *s.query_pred, s.adornment, s.spec);
  if (wants(s, "report")) print_report(mp);
  if (wants(s, "program")) print_program_section(mp.program);
  return kOk;
}

int do_run(const CommonOpts& co, const EngineOpts& eo, bool diagnose) {
  Session s;
  if (int rc = prepare(co, diagnose ? "chart" : "chart,answers", s); rc != kOk) return rc;
  EvalConfig cfg;
  if (diagnose) {
    EngineOpts forced = eo;
    forced.strategy = "not-so-naive";
    forced.subsumption = "off";
    if (int rc = parse_engine_opts(forced, cfg); rc != kOk) return rc;
  } else if (int rc = parse_engine_opts(eo, cfg); rc != kOk) {
    return rc;
  }

  std::optional<MagicProgram> mp;
  const Program* evalp = &s.program;
  std::vector<TermPtr> seeds;
  if (!s.spec.raw) {
    if (!s.query_atom) return fail("evaluation requires a --query atom");
    mp.emplace(run_pipeline(s.program, *s.query_pred, s.adornment, s.spec));
    evalp = &mp->program;
    seeds.push_back(make_seed(*mp, *s.query_atom));
  }

  EvalResult res = evaluate(*evalp, seeds, cfg);

  if (mp && wants(s, "report")) print_report(*mp);
  if (wants(s, "program")) print_program_section(*evalp);
  if (wants(s, "chart")) {
    std::cout << "% chart\n";
    std::cout << dump_chart(res.chart);
  }
  if (!diagnose && s.query_atom && wants(s, "answers")) {
    std::cout << "% answers\n";
    auto as = answers(res.chart, *s.query_atom);
    if (as.empty()) std::cout << "% none\n";
    for (const auto& a : as) std::cout << print_fact(a) << "\n";
  }
  if (!diagnose && eo.trace_id >= 0) {
    if (eo.trace_id < 1 || eo.trace_id > static_cast<int>(res.chart.facts.size()))
      return fail("--trace id out of range");
    std::cout << "% trace " << eo.trace_id << "\n";
    std::cout << trace_fact(res.chart, eo.trace_id);
  }
  if (res.exceeded) {
    std::cout << "% resource limit: " << res.reason << "\n";
    return kResourceLimit;
  }
  if (diagnose) {
    auto clusters = analyze_duplicates(res.chart);
    std::cout << "% duplicates\n";
    if (clusters.empty()) {
      std::cout << "% none\n";
      return kOk;
    }
    for (const auto& cl : clusters) {
      std::cout << cl.pred.display() << ": facts [";
      for (size_t i = 0; i < cl.fact_ids.size(); ++i)
        std::cout << (i ? "," : "") << cl.fact_ids[i];
      std::cout << "]\n";
    }
    return kDuplicates;
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"guard-driven grammar compiler and bottom-up evaluator"};
  app.require_subcommand(1);

  CommonOpts compile_opts;
  CLI::App* compile = app.add_subcommand("compile", "print the compiled program");
  add_common(compile, compile_opts);

  CommonOpts run_opts;
  EngineOpts run_engine;
  CLI::App* run = app.add_subcommand("run", "evaluate a query bottom-up");
  add_common(run, run_opts);
  add_engine(run, run_engine, /*with_strategy=*/true);

  CommonOpts diag_opts;
  EngineOpts diag_engine;
  CLI::App* diag =
      app.add_subcommand("diagnose", "store every derivation and report duplicates");
  add_common(diag, diag_opts);
  add_engine(diag, diag_engine, /*with_strategy=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadOptions;
  }

  try {
    if (compile->parsed()) return do_compile(compile_opts);
    if (run->parsed()) return do_run(run_opts, run_engine, /*diagnose=*/false);
    if (diag->parsed()) return do_run(diag_opts, diag_engine, /*diagnose=*/true);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadOptions;
  }
  return kBadOptions;
}
