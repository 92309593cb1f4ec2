// hypgen CLI: train / infer / baseline / sweep / report.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hypgen/harness.hpp"
#include "hypgen/util.hpp"

namespace {

using namespace hypgen;

struct CommonArgs {
    std::string config_path;
    std::string task = "shoe_sales";
    std::string dataset;
    std::string model;
    std::string inference_model;
    std::string profile;
    std::string out_dir = "runs/latest";
    long train_size = 200;
    long test_size = 300;
    std::uint64_t seed = 42;
    bool seed_set = false;
    std::string cache_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file; CLI flags override it");
    cmd->add_option("--task", args.task, "Task name (shoe_sales, deceptive_reviews, ...)");
    cmd->add_option("--dataset", args.dataset,
                    "JSON Lines dataset; omitted for shoe_sales generates data");
    cmd->add_option("--model", args.model,
                    "Generation model id; rule:<task> or transcript:<path> run offline");
    cmd->add_option("--inference-model", args.inference_model,
                    "Inference model id when different from --model");
    cmd->add_option("--profile", args.profile, "Hyperparameter profile: H3 or H20");
    cmd->add_option("--out", args.out_dir, "Run directory for outputs");
    cmd->add_option("--train-size", args.train_size, "Training examples to sample");
    cmd->add_option("--test-size", args.test_size, "Test examples to sample");
    cmd->add_option("--seed", args.seed, "RNG seed")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--cache-dir", args.cache_dir, "LLM response cache directory");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
    ExperimentConfig cfg;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw DomainError("cannot open config: " + args.config_path);
        cfg = nlohmann::json::parse(in).get<ExperimentConfig>();
    }
    if (!args.profile.empty()) harness::apply_profile(cfg, args.profile);
    if (!args.model.empty()) cfg.model = args.model;
    if (!args.inference_model.empty()) cfg.inference_model = args.inference_model;
    if (args.seed_set || args.config_path.empty()) cfg.seed = args.seed;
    cfg.validate();
    return cfg;
}

std::vector<Example> resolve_dataset(const CommonArgs& args, const TaskDescriptor& task,
                                     const ExperimentConfig& cfg) {
    if (!args.dataset.empty()) return tasks::load_dataset(args.dataset, task);
    if (task.name == "shoe_sales") {
        const auto n = static_cast<std::size_t>(args.train_size + args.test_size);
        return tasks::generate_shoe_sales(std::max<std::size_t>(n, 600), cfg.seed);
    }
    throw DomainError("--dataset is required for task " + task.name);
}

Gateway make_gateway(const CommonArgs& args, const ExperimentConfig& cfg) {
    GatewayOptions options;
    if (!args.cache_dir.empty()) options.cache_dir = args.cache_dir;
    return Gateway(harness::make_backend(cfg.model), options);
}

void print_report(const harness::Report& report) {
    std::cout << report.strategy << ": " << report.correct << "/" << report.n
              << "  accuracy " << report.ci.point << " +/- " << report.ci.half_width;
    if (report.unparseable > 0) std::cout << "  (" << report.unparseable << " unparseable)";
    std::cout << "\n";
}

int cmd_train(const CommonArgs& args) {
    const auto& task = tasks::builtin(args.task);
    const auto cfg = resolve_config(args);
    const auto data = resolve_dataset(args, task, cfg);
    const auto [train, test] = tasks::sample_split(
        data, static_cast<std::size_t>(args.train_size),
        static_cast<std::size_t>(args.test_size), cfg.seed);
    auto gateway = make_gateway(args, cfg);
    harness::RunPaths paths{args.out_dir};
    const auto summary = harness::run_train(task, cfg, train, gateway, paths);

    std::cout << "trained " << summary.state.t << " steps, "
              << summary.state.regenerations << " regenerations, bank size "
              << summary.state.bank.entries.size() << " (hash " << summary.bank_hash
              << ")\n";
    for (const auto& h : summary.state.bank.entries)
        std::cout << "  " << h.id << "  acc " << h.ledger.accuracy() << "  seen "
                  << h.ledger.seen << "  " << h.text << "\n";
    return 0;
}

int cmd_infer(const CommonArgs& args, const std::string& bank_path,
              const std::string& strategy) {
    const auto& task = tasks::builtin(args.task);
    ExperimentConfig cfg = resolve_config(args);
    const auto data = resolve_dataset(args, task, cfg);
    const auto [train, test] = tasks::sample_split(
        data, static_cast<std::size_t>(args.train_size),
        static_cast<std::size_t>(args.test_size), cfg.seed);
    const auto bank = harness::load_bank(bank_path);
    ExperimentConfig infer_cfg = cfg;
    if (infer_cfg.model.rfind("rule:", 0) == 0 && infer_cfg.inference_model.empty())
        infer_cfg.inference_model = infer_cfg.model;
    Gateway gateway(harness::make_backend(infer_cfg.resolved_inference_model()),
                    [&] {
                        GatewayOptions o;
                        if (!args.cache_dir.empty()) o.cache_dir = args.cache_dir;
                        return o;
                    }());
    harness::RunPaths paths{args.out_dir};
    const auto report = harness::run_infer(task, infer_cfg, bank,
                                           strategy_from_name(strategy), test, train,
                                           gateway, paths);
    print_report(report);
    return 0;
}

int cmd_baseline(const CommonArgs& args, const std::string& kind) {
    const auto& task = tasks::builtin(args.task);
    const auto cfg = resolve_config(args);
    const auto data = resolve_dataset(args, task, cfg);
    const auto [train, test] = tasks::sample_split(
        data, static_cast<std::size_t>(args.train_size),
        static_cast<std::size_t>(args.test_size), cfg.seed);
    auto gateway = make_gateway(args, cfg);
    harness::RunPaths paths{args.out_dir};
    const auto report = harness::run_baseline(task, cfg, harness::baseline_from_name(kind),
                                              train, test, gateway, paths);
    print_report(report);
    return 0;
}

int cmd_sweep(const CommonArgs& args, std::vector<long> sizes, const std::string& strategy) {
    if (sizes.empty()) sizes = {10, 25, 50, 100, 200};
    const auto& task = tasks::builtin(args.task);
    const auto cfg = resolve_config(args);
    nlohmann::json summary = nlohmann::json::array();
    for (const long size : sizes) {
        CommonArgs sized = args;
        sized.train_size = size;
        sized.out_dir = args.out_dir + "/train_" + std::to_string(size);
        const auto data = resolve_dataset(sized, task, cfg);
        const auto [train, test] = tasks::sample_split(
            data, static_cast<std::size_t>(size),
            static_cast<std::size_t>(args.test_size), cfg.seed);
        auto gateway = make_gateway(sized, cfg);
        harness::RunPaths paths{sized.out_dir};
        const auto trained = harness::run_train(task, cfg, train, gateway, paths);
        const auto report =
            harness::run_infer(task, cfg, trained.state.bank, strategy_from_name(strategy),
                               test, train, gateway, paths);
        std::cout << "train_size " << size << "  ";
        print_report(report);
        summary.push_back({{"train_size", size}, {"report", report}});
    }
    std::ofstream out(args.out_dir + "/sweep.json");
    out << summary.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& predictions_path, const std::string& out_path) {
    const auto records = harness::load_predictions(predictions_path);
    const auto report = harness::report_from_records(records, nlohmann::json::object(), "");
    print_report(report);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << nlohmann::json(report).dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandit-guided natural-language hypothesis generation and evaluation"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string bank_path, strategy = "best_accuracy", kind = "zero_shot";
    std::string predictions_path, report_out;
    std::vector<long> sweep_sizes;

    auto* train = app.add_subcommand("train", "Run the hypothesis-generation training loop");
    add_common(train, args);

    auto* infer = app.add_subcommand("infer", "Evaluate a saved bank on the test split");
    add_common(infer, args);
    infer->add_option("--bank", bank_path, "Saved bank.json")->required();
    infer->add_option("--strategy", strategy,
                      "best_accuracy | filter_weighted_vote | adaptive_one_step | "
                      "adaptive_two_step | oracle");

    auto* baseline = app.add_subcommand("baseline", "Zero-shot / few-shot / no-updates");
    add_common(baseline, args);
    baseline->add_option("--kind", kind, "zero_shot | few_shot | no_updates")->required();

    auto* sweep = app.add_subcommand("sweep", "Train/infer across training-set sizes");
    add_common(sweep, args);
    sweep->add_option("--train-sizes", sweep_sizes, "Sizes (default 10 25 50 100 200)");
    sweep->add_option("--strategy", strategy, "Inference strategy for the sweep");

    auto* report = app.add_subcommand("report", "Recompute a report from predictions.jsonl");
    report->add_option("--predictions", predictions_path, "predictions.jsonl")->required();
    report->add_option("--out", report_out, "Where to write report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(args);
        if (infer->parsed()) return cmd_infer(args, bank_path, strategy);
        if (baseline->parsed()) return cmd_baseline(args, kind);
        if (sweep->parsed()) return cmd_sweep(args, sweep_sizes, strategy);
        if (report->parsed()) return cmd_report(predictions_path, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
