#pragma once

#include <memory>
#include <string>

#include "hypgen/llm.hpp"

namespace hypgen {

/// Deterministic offline backends, one per built-in task. Each one proposes
/// distractor hypotheses first; once the generation prompt's observations
/// carry enough evidence against the distractors, it proposes the task's
/// true rule. Any hypothesis naming the task's decisive feature is applied
/// faithfully at inference time. Useful for demos, CI, and replay tests —
/// no network involved.
std::shared_ptr<LlmBackend> make_rule_backend(const std::string& task_name);

}  // namespace hypgen
