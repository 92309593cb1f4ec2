#include "hypgen/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "hypgen/tasks.hpp"
#include "hypgen/util.hpp"

namespace hypgen {

namespace {

constexpr double kGenerationTemperature = 1.0;
constexpr double kInferenceTemperature = 0.0;

std::string join_observations(const TaskDescriptor& task,
                              const std::vector<const Example*>& examples) {
    std::ostringstream os;
    for (const Example* e : examples) os << tasks::observation_text(task, *e, true) << "\n";
    return os.str();
}

}  // namespace

Engine::Engine(const TaskDescriptor& task, ExperimentConfig cfg, Gateway& gateway,
               TraceSink trace)
    : task_(task), cfg_(std::move(cfg)), gateway_(gateway), trace_(std::move(trace)) {
    cfg_.validate();
}

void Engine::emit(const nlohmann::json& event) const {
    if (trace_) trace_(event);
}

long Engine::w_hyp_schedule(long t, long total_train, long k) {
    if (t < 1 || total_train < 1 || t > total_train)
        throw std::invalid_argument("w_hyp_schedule: need 1 <= t <= total_train");
    const long ramp = static_cast<long>(
        std::ceil(static_cast<double>(k) * static_cast<double>(t) / total_train));
    return std::clamp(ramp, 1L, k);
}

Hypothesis Engine::make_hypothesis(TrainState& state, const std::string& text) const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "h%04ld", state.hyp_counter++);
    return Hypothesis{buf, trim(text), state.t, EvalLedger{}};
}

Engine::Verdict Engine::evaluate_hypothesis(const Hypothesis& h, const Example& example) {
    Bindings bindings = tasks::payload_bindings(task_, example);
    bindings["hypothesis_high_reward"] = h.text;
    Verdict v;
    v.hypothesis_id = h.id;
    try {
        const PromptPair prompt = render(task_.inference, bindings);
        v.raw = gateway_.complete(cfg_.model, prompt, {kInferenceTemperature});
        v.parsed = normalize_label(v.raw, task_);
    } catch (const LlmError& e) {
        v.raw = std::string("<error: ") + e.what() + ">";
        v.parsed = std::nullopt;
    }
    v.correct = v.parsed && *v.parsed == example.label;
    return v;
}

void Engine::reward_initialize(TrainState& state, Hypothesis& h,
                               const std::vector<const Example*>& examples,
                               const char* phase) {
    for (const Example* e : examples) {
        const Verdict v = evaluate_hypothesis(h, *e);
        h.ledger.record(e->id, v.correct);
        emit({{"type", "reward_init"},
              {"phase", phase},
              {"t", state.t},
              {"example_id", e->id},
              {"hypothesis_id", h.id},
              {"parsed_label", v.parsed ? nlohmann::json(*v.parsed) : nlohmann::json()},
              {"correct", v.correct}});
    }
}

std::vector<std::string> Engine::request_hypotheses(const std::string& observations,
                                                    std::size_t count) {
    const Bindings bindings = {{"num_hypotheses", std::to_string(count)},
                               {"observations", observations}};
    const PromptPair prompt = render(task_.generation, bindings);
    // Models sometimes return more items than requested; keep a margin and
    // let the caller rank the surplus by initialized reward.
    const std::size_t cap = count + 10;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string raw =
            gateway_.complete(cfg_.model, prompt, {kGenerationTemperature});
        auto texts = parse_hypotheses(raw, cap);
        if (!texts.empty()) return texts;
    }
    throw EngineError("hypothesis generation produced no parseable output");
}

TrainState Engine::initialize(const std::vector<Example>& train) {
    if (train.size() < cfg_.num_init)
        throw EngineError("fewer training examples than num_init");

    TrainState state;
    state.bank.capacity = cfg_.bank_capacity;
    state.wrong.capacity = cfg_.w_max;
    state.init_examples.assign(train.begin(), train.begin() + cfg_.num_init);
    Rng rng(cfg_.seed);
    state.rng_state = rng.save_state();

    std::vector<const Example*> init_ptrs;
    for (const auto& e : state.init_examples) init_ptrs.push_back(&e);

    const auto texts =
        request_hypotheses(join_observations(task_, init_ptrs), cfg_.bank_capacity);
    if (texts.size() < cfg_.bank_capacity)
        std::cerr << "[hypgen] warning: " << texts.size() << " of " << cfg_.bank_capacity
                  << " requested hypotheses parsed at initialization\n";

    std::vector<Hypothesis> candidates;
    for (const auto& text : texts) {
        const bool dup = std::any_of(candidates.begin(), candidates.end(), [&](const auto& h) {
            return normalize_text(h.text) == normalize_text(text);
        });
        if (dup) continue;
        Hypothesis h = make_hypothesis(state, text);
        reward_initialize(state, h, init_ptrs, "init");
        candidates.push_back(std::move(h));
    }

    // Rank surplus candidates by initialized reward; ln(1) = 0 so this is
    // accuracy order with the global tie-break.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const Hypothesis& a, const Hypothesis& b) {
                         return bandit::outranks(a, b, 1, cfg_.alpha);
                     });
    if (candidates.size() > cfg_.bank_capacity) candidates.resize(cfg_.bank_capacity);
    state.bank.entries = std::move(candidates);

    emit({{"type", "initialized"},
          {"t", state.t},
          {"num_init", state.init_examples.size()},
          {"bank_size", state.bank.entries.size()}});
    return state;
}

std::vector<Hypothesis> Engine::regenerate(TrainState& state) {
    if (!state.wrong.full()) throw EngineError("regenerate called before wrong bank is full");

    std::vector<const Example*> wrong_ptrs;
    for (const auto& e : state.wrong.items) wrong_ptrs.push_back(&e);
    const auto texts =
        request_hypotheses(join_observations(task_, wrong_ptrs), cfg_.hyp_per_update);

    // Reward-init on W union S_init so new arms compete on comparable ledgers.
    std::vector<const Example*> eval_set = wrong_ptrs;
    std::set<std::string> seen_ids;
    for (const Example* e : eval_set) seen_ids.insert(e->id);
    for (const auto& e : state.init_examples)
        if (seen_ids.insert(e.id).second) eval_set.push_back(&e);

    std::vector<Hypothesis> fresh;
    for (const auto& text : texts) {
        if (fresh.size() >= cfg_.hyp_per_update) break;
        if (state.bank.contains_text(text)) continue;
        const bool dup = std::any_of(fresh.begin(), fresh.end(), [&](const auto& h) {
            return normalize_text(h.text) == normalize_text(text);
        });
        if (dup) continue;
        Hypothesis h = make_hypothesis(state, text);
        reward_initialize(state, h, eval_set, "regen");
        fresh.push_back(std::move(h));
    }
    return fresh;
}

void Engine::train_step(TrainState& state, const Example& example, long total_train) {
    ++state.t;
    state.bank.step = state.t;

    const std::size_t k = std::min<std::size_t>(cfg_.top_k, state.bank.entries.size());
    std::vector<std::string> selected = bandit::top_k(state.bank, k, cfg_.alpha);
    // Verdicts are applied in hypothesis-id order so the trace stays
    // deterministic if evaluations ever run concurrently.
    std::sort(selected.begin(), selected.end());

    long wrong_count = 0;
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& id : selected) {
        auto it = std::find_if(state.bank.entries.begin(), state.bank.entries.end(),
                               [&](const Hypothesis& h) { return h.id == id; });
        const Verdict v = evaluate_hypothesis(*it, example);
        it->ledger.record(example.id, v.correct);
        if (!v.correct) ++wrong_count;
        evals.push_back(
            {{"hypothesis_id", v.hypothesis_id},
             {"parsed_label", v.parsed ? nlohmann::json(*v.parsed) : nlohmann::json()},
             {"correct", v.correct}});
    }

    const long threshold = w_hyp_schedule(state.t, total_train, static_cast<long>(k));
    const bool pooled = wrong_count >= threshold;
    if (pooled) state.wrong.items.push_back(example);

    emit({{"type", "step"},
          {"t", state.t},
          {"example_id", example.id},
          {"evaluations", evals},
          {"wrong_count", wrong_count},
          {"w_hyp", threshold},
          {"pooled", pooled}});

    if (state.wrong.full()) {
        const auto fresh = regenerate(state);
        state.bank = bandit::merge_and_truncate(state.bank, fresh, cfg_.alpha);
        state.wrong.clear();
        ++state.regenerations;
        nlohmann::json ids = nlohmann::json::array();
        for (const auto& h : fresh) ids.push_back(h.id);
        emit({{"type", "regeneration"},
              {"t", state.t},
              {"new_hypothesis_ids", ids},
              {"bank_size", state.bank.entries.size()}});
    }
}

TrainState Engine::run(const std::vector<Example>& train, const EngineOptions& options) {
    TrainState state;
    const bool has_checkpoint =
        !options.checkpoint_path.empty() && std::filesystem::exists(options.checkpoint_path);
    if (has_checkpoint) {
        state = load_checkpoint(options.checkpoint_path);
        if (state.t > static_cast<long>(train.size()))
            throw EngineError("checkpoint is ahead of the provided training stream");
    } else {
        state = initialize(train);
        if (!options.checkpoint_path.empty())
            save_checkpoint(state, options.checkpoint_path);
    }

    const long total = static_cast<long>(train.size());
    const long stop_at = options.stop_at_step > 0 ? options.stop_at_step : total;
    try {
        while (state.t < stop_at) {
            const long before_regens = state.regenerations;
            train_step(state, train[static_cast<std::size_t>(state.t)], total);
            const bool periodic = options.checkpoint_every > 0 &&
                                  state.t % static_cast<long>(options.checkpoint_every) == 0;
            if (!options.checkpoint_path.empty() &&
                (periodic || state.regenerations != before_regens || state.t == stop_at))
                save_checkpoint(state, options.checkpoint_path);
        }
    } catch (const LlmError&) {
        // Generation-path failure after retries: leave a resumable checkpoint.
        if (!options.checkpoint_path.empty()) save_checkpoint(state, options.checkpoint_path);
        throw;
    } catch (const EngineError&) {
        if (!options.checkpoint_path.empty()) save_checkpoint(state, options.checkpoint_path);
        throw;
    }
    return state;
}

void Engine::save_checkpoint(const TrainState& state,
                             const std::filesystem::path& path) const {
    nlohmann::json j = {{"task", task_.name},
                        {"config", cfg_},
                        {"t", state.t},
                        {"bank", state.bank},
                        {"wrong", state.wrong},
                        {"init_examples", state.init_examples},
                        {"rng_state", state.rng_state},
                        {"hyp_counter", state.hyp_counter},
                        {"regenerations", state.regenerations}};
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw EngineError("cannot write checkpoint: " + path.string());
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

TrainState Engine::load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw EngineError("cannot open checkpoint: " + path.string());
    const nlohmann::json j = nlohmann::json::parse(in);
    TrainState state;
    j.at("t").get_to(state.t);
    j.at("bank").get_to(state.bank);
    j.at("wrong").get_to(state.wrong);
    j.at("init_examples").get_to(state.init_examples);
    j.at("rng_state").get_to(state.rng_state);
    j.at("hyp_counter").get_to(state.hyp_counter);
    j.at("regenerations").get_to(state.regenerations);
    return state;
}

}  // namespace hypgen
