// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any of them fail. Pass the data
// directory holding the bundled stand-in corpora as argv[1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <mpfr.h>

#include <hypgen/harness.hpp>
#include <hypgen/rule_backends.hpp>

using namespace hypgen;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!ok) ++failures;
}

void run_criterion(int criterion, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        report(criterion, ok, detail);
    } catch (const std::exception& e) {
        report(criterion, false, std::string("exception: ") + e.what());
    }
}

fs::path fresh_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("hypgen_acceptance_" + tag);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string one_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

ExperimentConfig shoe_h3_config() {
    ExperimentConfig cfg;
    harness::apply_profile(cfg, "H3");
    cfg.seed = 42;
    cfg.model = "rule:shoe_sales";
    return cfg;
}

// 1. Under the small profile with the offline rule backend, training on 200
//    synthetic shoe customers must surface the shirt-color rule as the top
//    hypothesis and score 300/300 on held-out customers, within 5 seconds.
std::pair<bool, std::string> criterion_convergence() {
    const auto start = std::chrono::steady_clock::now();
    const auto& task = tasks::builtin("shoe_sales");
    auto cfg = shoe_h3_config();
    const auto data = tasks::generate_shoe_sales(500, cfg.seed);
    auto [train, test] = tasks::sample_split(data, 200, 300, cfg.seed);

    const auto dir = fresh_dir("convergence");
    Gateway gateway(harness::make_backend(cfg.model), {});
    const auto summary =
        harness::run_train(task, cfg, train, gateway, harness::RunPaths{dir});

    const Hypothesis& top = best_accuracy(summary.state.bank);
    const bool converged =
        top.text == "Customers buy shoes that match the color of their shirt.";

    const auto rep = harness::run_infer(task, cfg, summary.state.bank,
                                        Strategy::BestAccuracy, test, train, gateway,
                                        harness::RunPaths{dir});
    const double secs = elapsed_seconds(start);
    fs::remove_all(dir);

    std::ostringstream os;
    os << "shirt-color rule " << (converged ? "found" : "missing") << ", test "
       << rep.correct << "/" << rep.n << ", " << one_decimal(secs) << "s";
    return {converged && rep.correct == 300 && rep.n == 300 && secs < 5.0, os.str()};
}

// 2. The score formatter must reproduce two published accuracy lines exactly
//    to one decimal: 225/300 -> 75.0 +/- 4.9 and 186/300 -> 62.0 +/- 5.5.
std::pair<bool, std::string> criterion_intervals() {
    const auto a = harness::confidence_interval(225, 300);
    const auto b = harness::confidence_interval(186, 300);
    const bool ok = one_decimal(a.point) == "75.0" && one_decimal(a.half_width) == "4.9" &&
                    one_decimal(b.point) == "62.0" && one_decimal(b.half_width) == "5.5";
    std::ostringstream os;
    os << "225/300 -> " << one_decimal(a.point) << " +/- " << one_decimal(a.half_width)
       << ", 186/300 -> " << one_decimal(b.point) << " +/- " << one_decimal(b.half_width);
    return {ok, os.str()};
}

// Arbitrary-precision reference for the selection score, at 256 bits.
double mpfr_reward(long correct, long seen, long t, double alpha) {
    mpfr_t acc, bonus, result;
    mpfr_inits2(256, acc, bonus, result, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_si(acc, correct, MPFR_RNDN);
    mpfr_div_si(acc, acc, seen, MPFR_RNDN);
    mpfr_set_si(bonus, t, MPFR_RNDN);
    mpfr_log(bonus, bonus, MPFR_RNDN);
    mpfr_div_si(bonus, bonus, seen, MPFR_RNDN);
    mpfr_sqrt(bonus, bonus, MPFR_RNDN);
    mpfr_mul_d(bonus, bonus, alpha, MPFR_RNDN);
    mpfr_add(result, acc, bonus, MPFR_RNDN);
    const double out = mpfr_get_d(result, MPFR_RNDN);
    mpfr_clears(acc, bonus, result, static_cast<mpfr_ptr>(nullptr));
    return out;
}

// 3. The selection score must track a 256-bit reference within 1e-12
//    relative error over 1000 random inputs, and unevaluated arms must
//    dominate every evaluated one.
std::pair<bool, std::string> criterion_reward_oracle() {
    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const long seen = 1 + static_cast<long>(rng.bounded(1000));
        const long correct = static_cast<long>(rng.bounded(seen + 1));
        const long t = 1 + static_cast<long>(rng.bounded(10000));
        const double alpha = static_cast<double>(rng.bounded(2001)) / 1000.0;

        EvalLedger ledger;
        ledger.correct = correct;
        ledger.seen = seen;
        const double got = bandit::reward(ledger, t, alpha);
        const double want = mpfr_reward(correct, seen, t, alpha);
        const double rel = std::abs(got - want) / std::max(1.0, std::abs(want));
        worst = std::max(worst, rel);
    }

    EvalLedger fresh;
    EvalLedger perfect;
    perfect.correct = 1000000;
    perfect.seen = 1000000;
    const bool sentinel = std::isinf(bandit::reward(fresh, 2, 0.5)) &&
                          bandit::reward(fresh, 2, 0.5) > bandit::reward(perfect, 2, 10.0);

    std::ostringstream os;
    os << "1000 samples, worst relative error " << worst
       << (sentinel ? ", unevaluated arms dominate" : ", sentinel broken");
    return {worst <= 1e-12 && sentinel, os.str()};
}

// 4. Redundancy pruning must match exhaustive subset enumeration on 500
//    random instances of up to 12 rows.
std::pair<bool, std::string> criterion_prune_oracle() {
    Rng rng(13);
    int mismatches = 0;
    double worst_gap = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        const std::size_t rows = 1 + rng.bounded(12);
        const std::size_t cols = 1 + rng.bounded(14);
        CorrectnessMatrix m;
        std::vector<double> acc;
        for (std::size_t r = 0; r < rows; ++r) {
            m.row_ids.push_back("h" + std::to_string(r));
            std::vector<std::uint8_t> row(cols);
            for (auto& bit : row) bit = static_cast<std::uint8_t>(rng.bounded(2));
            m.bits.push_back(std::move(row));
            acc.push_back(static_cast<double>(rng.bounded(1001)) / 1000.0);
        }
        const double gamma = static_cast<double>(rng.bounded(1001)) / 1000.0;

        const auto picked = prune(m, acc, gamma);
        double got = 0.0;
        bool feasible = true;
        for (std::size_t i = 0; i < picked.size(); ++i) {
            got += acc[picked[i]];
            for (std::size_t j = i + 1; j < picked.size(); ++j)
                if (row_cosine(m.bits[picked[i]], m.bits[picked[j]]) > gamma)
                    feasible = false;
        }

        double best = 0.0;
        for (std::uint32_t mask = 0; mask < (1u << rows); ++mask) {
            double value = 0.0;
            bool ok = true;
            for (std::size_t i = 0; i < rows && ok; ++i) {
                if (!(mask & (1u << i))) continue;
                value += acc[i];
                for (std::size_t j = i + 1; j < rows && ok; ++j)
                    if ((mask & (1u << j)) && row_cosine(m.bits[i], m.bits[j]) > gamma)
                        ok = false;
            }
            if (ok) best = std::max(best, value);
        }
        const double gap = std::abs(got - best);
        worst_gap = std::max(worst_gap, gap);
        if (!feasible || gap > 1e-9) ++mismatches;
    }
    std::ostringstream os;
    os << "500 instances, " << mismatches << " mismatches, worst objective gap "
       << worst_gap;
    return {mismatches == 0, os.str()};
}

// 5. On a bank of imperfect rules, the oracle upper bound must dominate
//    every other strategy.
std::pair<bool, std::string> criterion_oracle_dominates() {
    const auto& task = tasks::builtin("shoe_sales");
    auto cfg = shoe_h3_config();
    const auto data = tasks::generate_shoe_sales(300, cfg.seed);
    auto [train, test] = tasks::sample_split(data, 100, 150, cfg.seed);

    // A bank of only the imperfect starter rules, scored on training data.
    Gateway gateway(harness::make_backend(cfg.model), {});
    InferenceRunner runner(task, cfg, gateway, train);
    HypothesisBank bank;
    bank.capacity = 3;
    bank.step = static_cast<long>(train.size());
    const std::vector<std::string> rules = {
        "Customers buy shoes that match the color of their hat.",
        "Customers buy shoes that match the color of their bag.",
        "Older customers prefer black shoes and younger customers prefer white shoes.",
    };
    for (std::size_t i = 0; i < rules.size(); ++i) {
        Hypothesis h;
        h.id = "h000" + std::to_string(i);
        h.text = rules[i];
        for (const auto& e : train) {
            const auto rec = runner.predict_with_hypothesis(h, e);
            h.ledger.record(e.id, rec.verdict);
        }
        bank.entries.push_back(std::move(h));
    }
    double oracle = 0.0;
    std::ostringstream os;
    std::vector<std::pair<std::string, double>> scores;
    for (auto s : {Strategy::Oracle, Strategy::BestAccuracy, Strategy::FilterWeightedVote,
                   Strategy::AdaptiveOneStep, Strategy::AdaptiveTwoStep}) {
        const auto records = runner.run(s, bank, test);
        long correct = 0;
        for (const auto& r : records) correct += r.verdict ? 1 : 0;
        const double accuracy = static_cast<double>(correct) / records.size();
        if (s == Strategy::Oracle)
            oracle = accuracy;
        else
            scores.emplace_back(strategy_name(s), accuracy);
    }

    bool dominated = true;
    os << "oracle " << one_decimal(100 * oracle);
    for (const auto& [name, accuracy] : scores) {
        os << ", " << name << " " << one_decimal(100 * accuracy);
        if (accuracy > oracle + 1e-12) dominated = false;
    }
    const bool nontrivial = oracle < 1.0;  // the starter rules must stay imperfect
    if (!nontrivial) os << " (bank unexpectedly perfect)";
    return {dominated && nontrivial, os.str()};
}

// 6. Same seed, same data: byte-identical trace and bank files; stopping at
//    any step and resuming must land on the same bytes as a straight run.
std::pair<bool, std::string> criterion_determinism() {
    const auto& task = tasks::builtin("shoe_sales");
    auto cfg = shoe_h3_config();
    const auto data = tasks::generate_shoe_sales(150, cfg.seed);
    auto [train, test] = tasks::sample_split(data, 100, 50, cfg.seed);

    auto run_to = [&](const fs::path& dir, long stop) {
        Gateway gateway(harness::make_backend(cfg.model), {});
        return harness::run_train(task, cfg, train, gateway, harness::RunPaths{dir}, stop);
    };

    const auto dir_a = fresh_dir("det_a");
    const auto dir_b = fresh_dir("det_b");
    run_to(dir_a, 0);
    run_to(dir_b, 0);
    const harness::RunPaths a{dir_a}, b{dir_b};
    const std::string trace_a = read_file(a.trace());
    const bool replay_ok = !trace_a.empty() && trace_a == read_file(b.trace()) &&
                           read_file(a.bank()) == read_file(b.bank());
    fs::remove_all(dir_b);

    bool resume_ok = true;
    for (long stop : {5L, 25L, 60L, 99L}) {
        const auto dir = fresh_dir("det_resume_" + std::to_string(stop));
        run_to(dir, stop);
        run_to(dir, 0);  // picks up the checkpoint left behind
        const harness::RunPaths r{dir};
        if (read_file(r.bank()) != read_file(a.bank()) ||
            read_file(r.trace()) != trace_a)
            resume_ok = false;
        fs::remove_all(dir);
    }
    fs::remove_all(dir_a);

    std::ostringstream os;
    os << "replay " << (replay_ok ? "byte-identical" : "diverged") << ", resume from 4 stops "
       << (resume_ok ? "byte-identical" : "diverged");
    return {replay_ok && resume_ok, os.str()};
}

// 7. The full pipeline (train, all five strategies, reports) must run over
//    the bundled 60-example corpus of every task shape in under 30 seconds.
std::pair<bool, std::string> criterion_end_to_end(const fs::path& data_dir) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::pair<std::string, std::string>> corpora = {
        {"shoe_sales", "shoe_sales_standin.jsonl"},
        {"deceptive_reviews", "deceptive_reviews_standin.jsonl"},
        {"headline_popularity", "headline_popularity_standin.jsonl"},
        {"tweet_popularity", "tweet_popularity_standin.jsonl"},
    };

    std::ostringstream os;
    bool ok = true;
    for (const auto& [task_name, file] : corpora) {
        const auto& task = tasks::builtin(task_name);
        ExperimentConfig cfg;
        harness::apply_profile(cfg, "H3");
        cfg.seed = 42;
        cfg.model = "rule:" + task_name;

        const auto corpus = tasks::load_dataset(data_dir / file, task);
        if (corpus.size() != 60) {
            os << task_name << ": corpus size " << corpus.size() << "; ";
            ok = false;
            continue;
        }
        auto [train, test] = tasks::sample_split(corpus, 40, 20, cfg.seed);

        const auto dir = fresh_dir("e2e_" + task_name);
        Gateway gateway(harness::make_backend(cfg.model), {});
        const auto summary =
            harness::run_train(task, cfg, train, gateway, harness::RunPaths{dir});

        long best = 0;
        for (auto s : {Strategy::BestAccuracy, Strategy::FilterWeightedVote,
                       Strategy::AdaptiveOneStep, Strategy::AdaptiveTwoStep,
                       Strategy::Oracle}) {
            const auto rep = harness::run_infer(task, cfg, summary.state.bank, s, test,
                                                train, gateway, harness::RunPaths{dir});
            if (rep.n != 20) ok = false;
            best = std::max(best, rep.correct);
        }
        fs::remove_all(dir);
        os << task_name << " best " << best << "/20, ";
        if (best < 15) ok = false;  // the rule backend should nail its own corpus
    }
    const double secs = elapsed_seconds(start);
    os << one_decimal(secs) << "s";
    return {ok && secs < 30.0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path data_dir = argc > 1 ? argv[1] : "data";

    run_criterion(1, [] { return criterion_convergence(); });
    run_criterion(2, [] { return criterion_intervals(); });
    run_criterion(3, [] { return criterion_reward_oracle(); });
    run_criterion(4, [] { return criterion_prune_oracle(); });
    run_criterion(5, [] { return criterion_oracle_dominates(); });
    run_criterion(6, [] { return criterion_determinism(); });
    run_criterion(7, [&] { return criterion_end_to_end(data_dir); });

    return failures == 0 ? 0 : 1;
}
