#pragma once

#include <string>
#include <vector>

#include "hypgen/domain.hpp"

namespace hypgen {

enum class PayloadKind { SingleText, PairedText, FeatureRecord };

struct PromptTemplate {
    std::string instruction;
    std::string user;
};

/// One regex (applied case-insensitively to lower-cased text) that maps an
/// answer fragment to a canonical label.
struct LabelPattern {
    std::string pattern;
    std::string label;
};

/// Everything task-specific: the label set, the answer-format regexes, and
/// the prompt template set. Canonical labels are lower-case snake_case.
struct TaskDescriptor {
    std::string name;
    PayloadKind payload_kind = PayloadKind::SingleText;
    std::vector<std::string> labels;
    std::vector<LabelPattern> label_patterns;

    PromptTemplate generation;
    PromptTemplate inference;
    PromptTemplate zero_shot;
    PromptTemplate few_shot;
    PromptTemplate adaptive;
    PromptTemplate relevance;

    bool has_label(const std::string& label) const;
};

}  // namespace hypgen
