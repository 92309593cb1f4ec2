#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypgen/engine.hpp"
#include "hypgen/inference.hpp"
#include "hypgen/tasks.hpp"

namespace hypgen::harness {

/// 95% binomial (Wald) interval on the percent scale:
/// point = 100*correct/n, half_width = 100*1.96*sqrt(p(1-p)/n).
struct ConfidenceInterval {
    double point = 0.0;
    double half_width = 0.0;
};

ConfidenceInterval confidence_interval(long correct, long n);

/// Hyperparameter profiles: "H3" (H=3, k=2, 1 hyp/update, gamma=0.3, all 3
/// used at inference) and "H20" (H=20, k=10, 5 hyp/update, gamma=0.7, top 5
/// at inference). Both use alpha=0.5, w_max=10, num_init=10, 5 examples per
/// hypothesis in adaptive prompts.
void apply_profile(ExperimentConfig& cfg, const std::string& profile);

/// Files written under a run directory.
struct RunPaths {
    std::filesystem::path dir;
    std::filesystem::path config() const { return dir / "config.json"; }
    std::filesystem::path bank() const { return dir / "bank.json"; }
    std::filesystem::path checkpoint() const { return dir / "checkpoint.json"; }
    std::filesystem::path trace() const { return dir / "trace.jsonl"; }
    std::filesystem::path predictions() const { return dir / "predictions.jsonl"; }
    std::filesystem::path report() const { return dir / "report.json"; }
};

struct Report {
    std::string strategy;
    long n = 0;
    long correct = 0;
    long unparseable = 0;
    ConfidenceInterval ci;
    std::string bank_hash;
    nlohmann::json config;
};

void to_json(nlohmann::json& j, const Report& r);

/// Backend selection from a model id: "rule:<task>" picks the offline rule
/// backend, "transcript:<path>" replays a recorded transcript, anything else
/// goes to the HTTP chat adapter configured from the environment.
std::shared_ptr<LlmBackend> make_backend(const std::string& model_id);

struct TrainSummary {
    TrainState state;
    std::string bank_hash;
};

/// Algorithm run end-to-end: train (resuming from an existing checkpoint in
/// the run directory), then persist config.json, bank.json, checkpoint.json
/// and trace.jsonl. `stop_at_step` > 0 stops early, leaving a resumable
/// checkpoint.
TrainSummary run_train(const TaskDescriptor& task, const ExperimentConfig& cfg,
                       const std::vector<Example>& train, Gateway& gateway,
                       const RunPaths& paths, long stop_at_step = 0);

HypothesisBank load_bank(const std::filesystem::path& path);
std::string save_bank(const HypothesisBank& bank, const std::filesystem::path& path);

/// Applies one inference strategy to the test set, writing predictions.jsonl
/// and report.json under the run directory.
Report run_infer(const TaskDescriptor& task, const ExperimentConfig& cfg,
                 const HypothesisBank& bank, Strategy strategy,
                 const std::vector<Example>& test, const std::vector<Example>& train,
                 Gateway& gateway, const RunPaths& paths);

enum class BaselineKind { ZeroShot, FewShot, NoUpdates };
BaselineKind baseline_from_name(const std::string& name);

/// zero_shot / few_shot prompt baselines (few-shot uses exactly 3 seeded
/// demonstrations) and the no-updates baseline (initialization only, then
/// best-accuracy inference).
Report run_baseline(const TaskDescriptor& task, const ExperimentConfig& cfg,
                    BaselineKind kind, const std::vector<Example>& train,
                    const std::vector<Example>& test, Gateway& gateway,
                    const RunPaths& paths);

/// Recomputes a report from saved per-example records; no LLM calls.
Report report_from_records(const std::vector<PredictionRecord>& records,
                           const nlohmann::json& config, const std::string& bank_hash);

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

}  // namespace hypgen::harness
