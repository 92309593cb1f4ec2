#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypgen/domain.hpp"
#include "hypgen/llm.hpp"
#include "hypgen/task.hpp"

namespace hypgen {

/// One-hot correctness encodings: bit (r, c) is 1 iff hypothesis r predicted
/// training example c correctly. Columns are the sorted union of recorded
/// correct ids; columns every hypothesis missed carry no similarity signal.
struct CorrectnessMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<std::vector<std::uint8_t>> bits;

    static CorrectnessMatrix from_hypotheses(const std::vector<Hypothesis>& hypotheses);
};

/// Cosine similarity between two correctness rows; zero vectors compare as 0.
double row_cosine(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

/// Exact subset selection: maximizes the accuracy sum over rows whose
/// pairwise cosine similarity stays <= gamma. Branch and bound over rows
/// ordered by (accuracy desc, id asc); banks are small (<= 25 rows).
/// Returns selected row indices in that order.
std::vector<std::size_t> prune(const CorrectnessMatrix& matrix,
                               const std::vector<double>& accuracies, double gamma);

/// Entry with maximal training accuracy (global tie-break). Rejects an empty
/// bank or entries with seen == 0.
const Hypothesis& best_accuracy(const HypothesisBank& bank);

/// Top n entries by training accuracy (global tie-break), descending.
std::vector<Hypothesis> top_by_accuracy(const HypothesisBank& bank, std::size_t n);

enum class Strategy { BestAccuracy, FilterWeightedVote, AdaptiveOneStep, AdaptiveTwoStep, Oracle };

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

/// Per-test-example record, one JSON line each in predictions.jsonl.
struct PredictionRecord {
    std::string example_id;
    std::string strategy;
    std::vector<std::string> chosen_hypothesis_ids;
    std::string raw_llm_text;
    std::optional<std::string> parsed_label;
    std::string gold_label;
    bool verdict = false;
};

void to_json(nlohmann::json& j, const PredictionRecord& r);
void from_json(const nlohmann::json& j, PredictionRecord& r);

/// Runs the inference strategies over test examples. `train_examples` backs
/// demonstration lookup for the adaptive prompts.
class InferenceRunner {
public:
    InferenceRunner(const TaskDescriptor& task, const ExperimentConfig& cfg, Gateway& gateway,
                    const std::vector<Example>& train_examples = {});

    /// Single-hypothesis prediction (the shared primitive).
    PredictionRecord predict_with_hypothesis(const Hypothesis& h, const Example& example);

    PredictionRecord best_accuracy_infer(const HypothesisBank& bank, const Example& example);
    PredictionRecord filter_weighted_vote(const std::vector<Hypothesis>& bank_top_n,
                                          const Example& example);
    PredictionRecord adaptive_one_step(const std::vector<Hypothesis>& selected,
                                       const Example& example);
    PredictionRecord adaptive_two_step(const std::vector<Hypothesis>& selected,
                                       const Example& example);

    /// Applies `strategy` to every test example. Oracle produces one record
    /// per example whose verdict is the any-hypothesis-correct union.
    std::vector<PredictionRecord> run(Strategy strategy, const HypothesisBank& bank,
                                      const std::vector<Example>& test);

    /// Accuracy counting an example correct iff any hypothesis predicted it
    /// correctly; `per_hypothesis` receives the underlying records.
    double oracle_inference(const std::vector<Hypothesis>& bank_top_n,
                            const std::vector<Example>& test,
                            std::vector<std::vector<PredictionRecord>>* per_hypothesis = nullptr);

    /// Pruned top-n set used by the adaptive strategies.
    std::vector<Hypothesis> pruned_selection(const HypothesisBank& bank) const;

private:
    std::string adaptive_info_block(const std::vector<Hypothesis>& selected) const;
    bool is_relevant(const Hypothesis& h, const Example& example);

    const TaskDescriptor& task_;
    ExperimentConfig cfg_;
    Gateway& gateway_;
    std::map<std::string, Example> train_by_id_;
};

}  // namespace hypgen
