#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypgen {

struct TaskDescriptor;

struct SingleText {
    std::string text;
};

struct PairedText {
    std::string first;
    std::string second;
};

struct FeatureRecord {
    std::map<std::string, std::string> fields;
};

using Payload = std::variant<SingleText, PairedText, FeatureRecord>;

/// One labeled instance. Immutable once constructed.
struct Example {
    std::string id;
    Payload payload;
    std::string label;
};

/// Running evaluation record for a hypothesis: how many examples it has been
/// tested on and which ones it got right, in evaluation order.
struct EvalLedger {
    long correct = 0;
    long seen = 0;
    std::vector<std::string> correct_example_ids;

    double accuracy() const { return seen > 0 ? static_cast<double>(correct) / seen : 0.0; }

    void record(const std::string& example_id, bool was_correct) {
        ++seen;
        if (was_correct) {
            ++correct;
            correct_example_ids.push_back(example_id);
        }
    }
};

/// A natural-language rule plus its evaluation ledger.
struct Hypothesis {
    std::string id;
    std::string text;
    long created_at_step = 0;
    EvalLedger ledger;
};

/// Capacity-bounded working set of hypotheses. Entries are kept unique by
/// normalized text; ordering is maintained by the bandit module.
struct HypothesisBank {
    std::size_t capacity = 0;
    std::vector<Hypothesis> entries;
    long step = 0;

    const Hypothesis* find(const std::string& id) const;
    bool contains_text(const std::string& text) const;
};

/// Bounded pool of training examples the current bank fails on. When it
/// fills, the engine regenerates hypotheses from it and clears it.
struct WrongExampleBank {
    std::size_t capacity = 0;
    std::vector<Example> items;

    bool full() const { return items.size() >= capacity; }
    void clear() { items.clear(); }
};

struct ExperimentConfig {
    double alpha = 0.5;
    std::size_t bank_capacity = 20;
    std::size_t top_k = 10;
    std::size_t w_max = 10;
    std::size_t num_init = 10;
    std::size_t hyp_per_update = 5;
    double gamma = 0.7;
    std::size_t inference_top_n = 5;
    std::size_t examples_per_hypothesis = 5;
    std::uint64_t seed = 42;
    std::string model = "gpt-3.5-turbo";
    std::string inference_model;  // defaults to `model` when empty

    std::string resolved_inference_model() const {
        return inference_model.empty() ? model : inference_model;
    }

    // Throws std::invalid_argument on violated bounds.
    void validate() const;
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maps an arbitrary LLM output fragment (or dataset label) to a member of
/// the task's label set. std::nullopt means Unparseable; callers count that
/// as incorrect and log the raw text.
std::optional<std::string> normalize_label(const std::string& raw, const TaskDescriptor& task);

void to_json(nlohmann::json& j, const Payload& p);
void from_json(const nlohmann::json& j, Payload& p);
void to_json(nlohmann::json& j, const Example& e);
void from_json(const nlohmann::json& j, Example& e);
void to_json(nlohmann::json& j, const EvalLedger& l);
void from_json(const nlohmann::json& j, EvalLedger& l);
void to_json(nlohmann::json& j, const Hypothesis& h);
void from_json(const nlohmann::json& j, Hypothesis& h);
void to_json(nlohmann::json& j, const HypothesisBank& b);
void from_json(const nlohmann::json& j, HypothesisBank& b);
void to_json(nlohmann::json& j, const WrongExampleBank& w);
void from_json(const nlohmann::json& j, WrongExampleBank& w);
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

}  // namespace hypgen
