#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypgen/bandit.hpp"
#include "hypgen/domain.hpp"
#include "hypgen/llm.hpp"
#include "hypgen/task.hpp"

namespace hypgen {

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mutable training state. The engine owns the single mutable copy; domain
/// values handed out elsewhere are snapshots.
struct TrainState {
    HypothesisBank bank;
    WrongExampleBank wrong;
    long t = 0;  // number of training examples consumed
    std::vector<Example> init_examples;
    std::string rng_state;
    long hyp_counter = 0;
    long regenerations = 0;
};

/// Receives one JSON object per trace event (evaluation, regeneration, ...).
using TraceSink = std::function<void(const nlohmann::json&)>;

struct EngineOptions {
    std::filesystem::path checkpoint_path;  // empty disables checkpointing
    std::size_t checkpoint_every = 25;
    long stop_at_step = 0;  // stop once t reaches this; 0 runs to the end
};

/// The training loop: initialization, per-example update stage, wrong-example
/// accumulation, regeneration, and reward initialization of new hypotheses.
class Engine {
public:
    Engine(const TaskDescriptor& task, ExperimentConfig cfg, Gateway& gateway,
           TraceSink trace = {});

    /// Linear ramp from 1 at t=1 to k at t=total_train:
    /// clamp(ceil(k*t/total_train), 1, k).
    static long w_hyp_schedule(long t, long total_train, long k);

    TrainState initialize(const std::vector<Example>& train);
    void train_step(TrainState& state, const Example& example, long total_train);
    std::vector<Hypothesis> regenerate(TrainState& state);

    /// End-to-end training over `train`, with periodic checkpoints. When the
    /// checkpoint file already exists, resumes from it.
    TrainState run(const std::vector<Example>& train, const EngineOptions& options = {});

    void save_checkpoint(const TrainState& state,
                         const std::filesystem::path& path) const;
    static TrainState load_checkpoint(const std::filesystem::path& path);

private:
    struct Verdict {
        std::string hypothesis_id;
        std::string raw;
        std::optional<std::string> parsed;
        bool correct = false;
    };

    Verdict evaluate_hypothesis(const Hypothesis& h, const Example& example);
    std::vector<std::string> request_hypotheses(const std::string& observations,
                                                std::size_t count);
    Hypothesis make_hypothesis(TrainState& state, const std::string& text) const;
    void reward_initialize(TrainState& state, Hypothesis& h,
                           const std::vector<const Example*>& examples,
                           const char* phase);
    void emit(const nlohmann::json& event) const;

    const TaskDescriptor& task_;
    ExperimentConfig cfg_;
    Gateway& gateway_;
    TraceSink trace_;
};

}  // namespace hypgen
