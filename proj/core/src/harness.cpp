#include "hypgen/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hypgen/rule_backends.hpp"
#include "hypgen/util.hpp"

namespace hypgen::harness {

ConfidenceInterval confidence_interval(long correct, long n) {
    if (n < 1 || correct < 0 || correct > n)
        throw DomainError("confidence_interval: need 0 <= correct <= n, n >= 1");
    const double p = static_cast<double>(correct) / n;
    return {100.0 * p, 100.0 * 1.96 * std::sqrt(p * (1.0 - p) / n)};
}

void apply_profile(ExperimentConfig& cfg, const std::string& profile) {
    cfg.alpha = 0.5;
    cfg.w_max = 10;
    cfg.num_init = 10;
    cfg.examples_per_hypothesis = 5;
    if (profile == "H3") {
        cfg.bank_capacity = 3;
        cfg.top_k = 2;
        cfg.hyp_per_update = 1;
        cfg.inference_top_n = 3;
        cfg.gamma = 0.3;
    } else if (profile == "H20") {
        cfg.bank_capacity = 20;
        cfg.top_k = 10;
        cfg.hyp_per_update = 5;
        cfg.inference_top_n = 5;
        cfg.gamma = 0.7;
    } else {
        throw DomainError("unknown profile: " + profile + " (expected H3 or H20)");
    }
}

void to_json(nlohmann::json& j, const Report& r) {
    j = {{"strategy", r.strategy},
         {"n", r.n},
         {"correct", r.correct},
         {"unparseable", r.unparseable},
         {"accuracy", r.ci.point},
         {"ci_half_width", r.ci.half_width},
         {"bank_hash", r.bank_hash},
         {"config", r.config}};
}

std::shared_ptr<LlmBackend> make_backend(const std::string& model_id) {
    if (model_id.rfind("rule:", 0) == 0) return make_rule_backend(model_id.substr(5));
    if (model_id.rfind("transcript:", 0) == 0)
        return TranscriptBackend::load(model_id.substr(11));
    return HttpChatBackend::from_env();
}

namespace {

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path.string());
    out << content;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<PredictionRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path.string());
    for (const auto& r : records) out << nlohmann::json(r).dump() << "\n";
}

Report finish_report(const TaskDescriptor& task, const ExperimentConfig& cfg,
                     const std::string& strategy,
                     const std::vector<PredictionRecord>& records,
                     const std::string& bank_hash, const RunPaths& paths) {
    nlohmann::json config(cfg);
    config["task"] = task.name;
    Report report = report_from_records(records, config, bank_hash);
    report.strategy = strategy;
    std::filesystem::create_directories(paths.dir);
    write_predictions(paths.predictions(), records);
    write_file(paths.report(), dump_json(nlohmann::json(report)));
    return report;
}

}  // namespace

std::string save_bank(const HypothesisBank& bank, const std::filesystem::path& path) {
    const std::string body = dump_json(nlohmann::json(bank));
    write_file(path, body);
    return content_hash(body);
}

HypothesisBank load_bank(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open bank: " + path.string());
    return nlohmann::json::parse(in).get<HypothesisBank>();
}

TrainSummary run_train(const TaskDescriptor& task, const ExperimentConfig& cfg,
                       const std::vector<Example>& train, Gateway& gateway,
                       const RunPaths& paths, long stop_at_step) {
    std::filesystem::create_directories(paths.dir);
    nlohmann::json config(cfg);
    config["task"] = task.name;
    write_file(paths.config(), dump_json(config));

    // Append so a resumed run extends the original trace.
    std::ofstream trace(paths.trace(), std::ios::app);
    if (!trace) throw DomainError("cannot write " + paths.trace().string());
    Engine engine(task, cfg, gateway,
                  [&](const nlohmann::json& event) { trace << event.dump() << "\n"; });

    EngineOptions options;
    options.checkpoint_path = paths.checkpoint();
    options.stop_at_step = stop_at_step;
    TrainState state = engine.run(train, options);
    trace.flush();

    TrainSummary summary{std::move(state), {}};
    summary.bank_hash = save_bank(summary.state.bank, paths.bank());
    return summary;
}

Report run_infer(const TaskDescriptor& task, const ExperimentConfig& cfg,
                 const HypothesisBank& bank, Strategy strategy,
                 const std::vector<Example>& test, const std::vector<Example>& train,
                 Gateway& gateway, const RunPaths& paths) {
    InferenceRunner runner(task, cfg, gateway, train);
    const auto records = runner.run(strategy, bank, test);
    const std::string bank_hash = content_hash(dump_json(nlohmann::json(bank)));
    return finish_report(task, cfg, strategy_name(strategy), records, bank_hash, paths);
}

BaselineKind baseline_from_name(const std::string& name) {
    if (name == "zero_shot") return BaselineKind::ZeroShot;
    if (name == "few_shot") return BaselineKind::FewShot;
    if (name == "no_updates") return BaselineKind::NoUpdates;
    throw DomainError("unknown baseline: " + name);
}

Report run_baseline(const TaskDescriptor& task, const ExperimentConfig& cfg,
                    BaselineKind kind, const std::vector<Example>& train,
                    const std::vector<Example>& test, Gateway& gateway,
                    const RunPaths& paths) {
    if (kind == BaselineKind::NoUpdates) {
        Engine engine(task, cfg, gateway);
        const TrainState state = engine.initialize(train);
        std::filesystem::create_directories(paths.dir);
        const std::string bank_hash = save_bank(state.bank, paths.bank());
        InferenceRunner runner(task, cfg, gateway, train);
        auto records = runner.run(Strategy::BestAccuracy, state.bank, test);
        for (auto& r : records) r.strategy = "no_updates";
        return finish_report(task, cfg, "no_updates", records, bank_hash, paths);
    }

    const bool few_shot = kind == BaselineKind::FewShot;
    std::string demonstrations;
    std::vector<std::string> demo_ids;
    if (few_shot) {
        // Exactly 3 seeded demonstrations, sampled without class balancing.
        std::vector<std::size_t> idx(train.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(cfg.seed);
        rng.shuffle(idx);
        std::ostringstream os;
        for (std::size_t i = 0; i < 3 && i < idx.size(); ++i) {
            os << tasks::observation_text(task, train[idx[i]], true) << "\n";
            demo_ids.push_back(train[idx[i]].id);
        }
        demonstrations = os.str();
    }

    std::vector<PredictionRecord> records;
    records.reserve(test.size());
    const std::string name = few_shot ? "few_shot" : "zero_shot";
    for (const auto& e : test) {
        Bindings bindings = tasks::payload_bindings(task, e);
        if (few_shot) bindings["demonstrations"] = demonstrations;
        PredictionRecord rec;
        rec.example_id = e.id;
        rec.gold_label = e.label;
        rec.strategy = name;
        rec.chosen_hypothesis_ids = demo_ids;  // demonstration ids, for audit
        try {
            const PromptPair prompt =
                render(few_shot ? task.few_shot : task.zero_shot, bindings);
            rec.raw_llm_text = gateway.complete(cfg.resolved_inference_model(), prompt, {0.0});
            rec.parsed_label = normalize_label(rec.raw_llm_text, task);
        } catch (const LlmError& err) {
            rec.raw_llm_text = std::string("<error: ") + err.what() + ">";
        }
        rec.verdict = rec.parsed_label && *rec.parsed_label == e.label;
        records.push_back(std::move(rec));
    }
    return finish_report(task, cfg, name, records, "", paths);
}

Report report_from_records(const std::vector<PredictionRecord>& records,
                           const nlohmann::json& config, const std::string& bank_hash) {
    Report report;
    report.n = static_cast<long>(records.size());
    for (const auto& r : records) {
        if (r.verdict) ++report.correct;
        if (!r.parsed_label) ++report.unparseable;
        if (report.strategy.empty()) report.strategy = r.strategy;
    }
    report.ci = confidence_interval(report.correct, std::max(report.n, 1L));
    report.config = config;
    report.bank_hash = bank_hash;
    return report;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open predictions: " + path.string());
    std::vector<PredictionRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(nlohmann::json::parse(line).get<PredictionRecord>());
    }
    return out;
}

}  // namespace hypgen::harness
