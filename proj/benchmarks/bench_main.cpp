#include <benchmark/benchmark.h>

#include <hypgen/bandit.hpp>
#include <hypgen/inference.hpp>
#include <hypgen/llm.hpp>
#include <hypgen/util.hpp>

using namespace hypgen;

namespace {

HypothesisBank make_bank(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    HypothesisBank bank;
    bank.capacity = n;
    bank.step = 200;
    for (std::size_t i = 0; i < n; ++i) {
        Hypothesis h;
        h.id = "h" + std::to_string(i);
        h.text = "generated rule number " + std::to_string(i);
        h.created_at_step = static_cast<long>(rng.bounded(200));
        const long seen = 1 + static_cast<long>(rng.bounded(200));
        for (long s = 0; s < seen; ++s)
            h.ledger.record("ex-" + std::to_string(s), rng.bounded(3) != 0);
        bank.entries.push_back(std::move(h));
    }
    return bank;
}

void reward_single(benchmark::State& state) {
    EvalLedger ledger;
    ledger.correct = 151;
    ledger.seen = 200;
    long t = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bandit::reward(ledger, t, 0.5));
        t = t % 100000 + 1;
    }
}
BENCHMARK(reward_single);

void top_k_of_bank(benchmark::State& state) {
    const auto bank = make_bank(static_cast<std::size_t>(state.range(0)), 1);
    const auto k = static_cast<std::size_t>(state.range(0)) / 2;
    for (auto _ : state) benchmark::DoNotOptimize(bandit::top_k(bank, k, 0.5));
}
BENCHMARK(top_k_of_bank)->Arg(3)->Arg(20)->Arg(100);

void merge_fresh_hypotheses(benchmark::State& state) {
    const auto bank = make_bank(20, 2);
    const auto extra = make_bank(5, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(bandit::merge_and_truncate(bank, extra.entries, 0.5));
}
BENCHMARK(merge_fresh_hypotheses);

void prune_bank(benchmark::State& state) {
    Rng rng(4);
    const std::size_t rows = static_cast<std::size_t>(state.range(0));
    CorrectnessMatrix m;
    std::vector<double> acc;
    for (std::size_t r = 0; r < rows; ++r) {
        m.row_ids.push_back("h" + std::to_string(r));
        std::vector<std::uint8_t> row(64);
        for (auto& bit : row) bit = static_cast<std::uint8_t>(rng.bounded(2));
        m.bits.push_back(std::move(row));
        acc.push_back(static_cast<double>(rng.bounded(1001)) / 1000.0);
    }
    for (auto _ : state) benchmark::DoNotOptimize(prune(m, acc, 0.7));
}
BENCHMARK(prune_bank)->Arg(5)->Arg(10)->Arg(20)->Arg(25);

void parse_numbered_list(benchmark::State& state) {
    std::string raw = "Here are the patterns I found:\n";
    for (int i = 1; i <= 20; ++i)
        raw += std::to_string(i) + ". Customers who match condition " + std::to_string(i) +
               " behave differently.\n";
    for (auto _ : state) benchmark::DoNotOptimize(parse_hypotheses(raw, 20));
}
BENCHMARK(parse_numbered_list);

void render_prompt(benchmark::State& state) {
    PromptTemplate tmpl;
    tmpl.instruction = "You study <domain> and report patterns.";
    tmpl.user =
        "Observations:\n<observations>\nPropose <num_hypotheses> possible patterns.";
    std::string observations;
    for (int i = 0; i < 10; ++i)
        observations += "Example " + std::to_string(i) + ": something happened.\n";
    const Bindings bindings = {{"domain", "customer behavior"},
                               {"observations", observations},
                               {"num_hypotheses", "20"}};
    for (auto _ : state) benchmark::DoNotOptimize(render(tmpl, bindings));
}
BENCHMARK(render_prompt);

}  // namespace

BENCHMARK_MAIN();
