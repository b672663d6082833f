#pragma once

#include <optional>
#include <string>

#include "magicforge/filters.hpp"

namespace magicforge {

// Which passes run, and with what knobs. The canonical order is fixed:
// guard transform, lexical pruning, guard trimming, cycle removal,
// indexing, unfolding.
struct PipelineSpec {
  bool raw = false; // evaluate the source program directly, no guards
  CompileMode mode = CompileMode::full_magic;
  bool prune = true;
  bool trim = true;
  bool cycles = false;
  bool index = false;
  bool unfold = false;
  bool keep_structural = false;
  int depth = 3;
  IndexScope index_scope = IndexScope::overlapping_only;
};

// Named presets: "raw", "v1" (prune + trim), "v1-no-cycle-removal"
// (same as v1), "v2" (prune + trim + cycles + index + unfold).
std::optional<PipelineSpec> pipeline_preset(const std::string& name);

// Returns an error message when the combination cannot run.
std::optional<std::string> validate_pipeline(const PipelineSpec& spec,
                                             bool has_adornment);

// Runs the enabled passes in canonical order. The spec must have passed
// validation; `aq` is required whenever spec.trim is set.
MagicProgram run_pipeline(const Program& source, const Predicate& query_pred,
                          const std::optional<AbstractQuery>& aq,
                          const PipelineSpec& spec);

} // namespace magicforge
