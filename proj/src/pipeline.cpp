#include "magicforge/pipeline.hpp"

#include <stdexcept>

namespace magicforge {

std::optional<PipelineSpec> pipeline_preset(const std::string& name) {
  PipelineSpec spec;
  if (name == "raw") {
    spec.raw = true;
    spec.prune = spec.trim = false;
    return spec;
  }
  if (name == "v1" || name == "v1-no-cycle-removal") {
    spec.prune = true;
    spec.trim = true;
    return spec;
  }
  if (name == "v2") {
    spec.prune = true;
    spec.trim = true;
    spec.cycles = true;
    spec.index = true;
    spec.unfold = true;
    return spec;
  }
  return std::nullopt;
}

std::optional<std::string> validate_pipeline(const PipelineSpec& spec,
                                             bool has_adornment) {
  if (spec.raw) return std::nullopt; // other switches are ignored
  if (spec.depth < 1) return "depth must be at least 1";
  if (spec.mode == CompileMode::lexical_only && spec.prune)
    return "prune_lexical cannot run on lexical-only guards (it would remove them all)";
  if (spec.mode == CompileMode::lexical_only && spec.index)
    return "index requires guards on the defined clauses";
  if (spec.trim && !has_adornment)
    return "trim requires a mode (a mode directive, --mode, or a ground query pattern)";
  if (spec.unfold && !spec.cycles)
    return "unfold requires cycle removal to run first";
  return std::nullopt;
}

MagicProgram run_pipeline(const Program& source, const Predicate& query_pred,
                          const std::optional<AbstractQuery>& aq,
                          const PipelineSpec& spec) {
  if (spec.raw)
    throw std::logic_error("run_pipeline: raw evaluation does not compile guards");
  MagicProgram mp = spec.mode == CompileMode::lexical_only
                        ? lexical_only_transform(source, query_pred)
                        : magic_transform(source, query_pred, spec.mode);
  if (spec.prune) prune_lexical_magic(mp);
  if (spec.trim) {
    if (!aq) throw std::logic_error("run_pipeline: trim requires an adornment");
    adorn_and_trim(mp, *aq, spec.keep_structural);
  }
  if (spec.cycles) remove_cycles(mp, spec.depth);
  if (spec.index) add_indexing(mp, spec.index_scope);
  if (spec.unfold) unfold_magic(mp);
  return mp;
}

} // namespace magicforge
