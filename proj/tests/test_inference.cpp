#include <catch2/catch.hpp>

#include <cmath>

#include <hypgen/inference.hpp>
#include <hypgen/rule_backends.hpp>
#include <hypgen/tasks.hpp>
#include <hypgen/util.hpp>

using namespace hypgen;

namespace {

Hypothesis scored(const std::string& id, const std::string& text, long correct, long seen) {
    Hypothesis h;
    h.id = id;
    h.text = text;
    h.ledger.correct = correct;
    h.ledger.seen = seen;
    for (long i = 0; i < correct; ++i)
        h.ledger.correct_example_ids.push_back(id + "-ex" + std::to_string(i));
    return h;
}

Example shoe_customer(const std::string& id, const std::string& shirt,
                      const std::string& hat, const std::string& bag,
                      const std::string& age = "30") {
    return Example{id,
                   FeatureRecord{{{"age", age},
                                  {"height", "tall"},
                                  {"gender", "female"},
                                  {"hat_color", hat},
                                  {"shirt_color", shirt},
                                  {"bag_color", bag},
                                  {"bag_size", "small"}}},
                   shirt};
}

ExperimentConfig shoe_config() {
    ExperimentConfig cfg;
    cfg.bank_capacity = 5;
    cfg.top_k = 3;
    cfg.inference_top_n = 3;
    cfg.gamma = 1.0;  // keep everything unless a test tightens it
    cfg.model = "rule:shoe_sales";
    return cfg;
}

/// Reference maximizer: tries every subset of rows.
double exhaustive_prune_value(const CorrectnessMatrix& m,
                              const std::vector<double>& acc, double gamma) {
    const std::size_t n = m.bits.size();
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double value = 0.0;
        bool feasible = true;
        for (std::size_t i = 0; i < n && feasible; ++i) {
            if (!(mask & (1u << i))) continue;
            value += acc[i];
            for (std::size_t j = i + 1; j < n && feasible; ++j)
                if ((mask & (1u << j)) && row_cosine(m.bits[i], m.bits[j]) > gamma)
                    feasible = false;
        }
        if (feasible && value > best) best = value;
    }
    return best;
}

}  // namespace

TEST_CASE("correctness rows line up against the sorted example union", "[inference]") {
    auto a = scored("hA", "rule a", 0, 4);
    a.ledger.correct_example_ids = {"e3", "e1"};
    a.ledger.correct = 2;
    auto b = scored("hB", "rule b", 0, 4);
    b.ledger.correct_example_ids = {"e2", "e1"};
    b.ledger.correct = 2;

    const auto m = CorrectnessMatrix::from_hypotheses({a, b});
    CHECK(m.col_ids == std::vector<std::string>{"e1", "e2", "e3"});
    CHECK(m.bits[0] == std::vector<std::uint8_t>{1, 0, 1});
    CHECK(m.bits[1] == std::vector<std::uint8_t>{1, 1, 0});
}

TEST_CASE("row cosine handles overlap, disjoint, and empty rows", "[inference]") {
    CHECK(row_cosine({1, 1, 0, 0}, {0, 0, 1, 1}) == 0.0);
    CHECK(row_cosine({1, 1, 0}, {1, 1, 0}) == Approx(1.0));
    CHECK(row_cosine({0, 0, 0}, {1, 1, 1}) == 0.0);
    CHECK(row_cosine({}, {}) == 0.0);
    // |a ∩ b| = 1, |a| = 2, |b| = 2: cosine = 1 / 2.
    CHECK(row_cosine({1, 1, 0}, {0, 1, 1}) == Approx(0.5));
}

TEST_CASE("pruning matches exhaustive subset search", "[inference]") {
    Rng rng(31);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t rows = 1 + rng.bounded(10);
        const std::size_t cols = 1 + rng.bounded(12);
        CorrectnessMatrix m;
        std::vector<double> acc;
        for (std::size_t r = 0; r < rows; ++r) {
            m.row_ids.push_back("h" + std::to_string(r));
            std::vector<std::uint8_t> row(cols);
            for (auto& bit : row) bit = static_cast<std::uint8_t>(rng.bounded(2));
            m.bits.push_back(std::move(row));
            acc.push_back(static_cast<double>(rng.bounded(1001)) / 1000.0);
        }
        const double gamma =
            std::vector<double>{0.0, 0.3, 0.7, 1.0}[rng.bounded(4)];

        const auto picked = prune(m, acc, gamma);
        double value = 0.0;
        for (std::size_t i : picked) value += acc[i];
        for (std::size_t i = 0; i < picked.size(); ++i)
            for (std::size_t j = i + 1; j < picked.size(); ++j)
                CHECK(row_cosine(m.bits[picked[i]], m.bits[picked[j]]) <= gamma);

        INFO("iter " << iter << " rows " << rows << " gamma " << gamma);
        CHECK(value == Approx(exhaustive_prune_value(m, acc, gamma)).margin(1e-12));
    }
}

TEST_CASE("pruning keeps dissimilar rules and drops redundant ones", "[inference]") {
    CorrectnessMatrix m;
    m.row_ids = {"h1", "h2", "h3"};
    m.bits = {{1, 1, 1, 0}, {1, 1, 0, 0}, {0, 0, 0, 1}};
    const std::vector<double> acc = {0.75, 0.5, 0.25};
    // cosine(h1, h2) = 2/sqrt(6) ~ 0.816: too close at gamma 0.5, h2 goes.
    const auto picked = prune(m, acc, 0.5);
    CHECK(picked == std::vector<std::size_t>{0, 2});
    // At gamma 0.9 everything coexists.
    CHECK(prune(m, acc, 0.9).size() == 3);
}

TEST_CASE("best accuracy rejects empty and unevaluated banks", "[inference]") {
    HypothesisBank bank;
    CHECK_THROWS_AS(best_accuracy(bank), DomainError);
    bank.entries = {scored("h1", "rule", 0, 0)};
    CHECK_THROWS_AS(best_accuracy(bank), DomainError);
    bank.entries = {scored("h1", "weak", 2, 10), scored("h2", "strong", 9, 10)};
    CHECK(best_accuracy(bank).id == "h2");
    // Equal accuracy: earlier id wins.
    bank.entries = {scored("h2", "b", 5, 10), scored("h1", "a", 5, 10)};
    CHECK(best_accuracy(bank).id == "h1");
}

TEST_CASE("weighted votes can overturn the single best rule", "[inference]") {
    Gateway gateway(make_rule_backend("shoe_sales"), {});
    InferenceRunner runner(tasks::builtin("shoe_sales"), shoe_config(), gateway);

    const std::vector<Hypothesis> top_n = {
        scored("h1", "Customers buy shoes that match the color of their shirt.", 8, 10),
        scored("h2", "Customers buy shoes that match the color of their hat.", 7, 10),
        scored("h3", "Customers buy shoes that match the color of their bag.", 6, 10),
    };

    // Hat and bag agree on red (0.7 + 0.6) and outvote the shirt rule (0.8).
    auto rec = runner.filter_weighted_vote(top_n, shoe_customer("c1", "blue", "red", "red"));
    CHECK(rec.parsed_label == "red");
    CHECK(rec.chosen_hypothesis_ids == std::vector<std::string>{"h1", "h2", "h3"});
    CHECK_FALSE(rec.verdict);  // gold label is the shirt color

    // Shirt and bag agree: 0.8 + 0.6 beats the hat's 0.7.
    rec = runner.filter_weighted_vote(top_n, shoe_customer("c2", "green", "black", "green"));
    CHECK(rec.parsed_label == "green");
    CHECK(rec.verdict);
}

TEST_CASE("with no relevant rule the vote falls back to best accuracy", "[inference]") {
    Gateway gateway(make_rule_backend("shoe_sales"), {});
    InferenceRunner runner(tasks::builtin("shoe_sales"), shoe_config(), gateway);

    // Neither rule mentions a feature the relevance check accepts.
    const std::vector<Hypothesis> top_n = {
        scored("h1", "Older customers prefer black shoes.", 9, 10),
        scored("h2", "Taller customers buy larger shoes.", 2, 10),
    };
    auto rec = runner.filter_weighted_vote(top_n, shoe_customer("c1", "red", "red", "red", "55"));
    CHECK(rec.chosen_hypothesis_ids == std::vector<std::string>{"h1"});
    CHECK(rec.parsed_label == "black");  // the age rule, applied by the fallback
}

TEST_CASE("two-step inference applies the pattern it chose", "[inference]") {
    auto transcript = std::make_shared<TranscriptBackend>();
    transcript->add_turn("Chosen pattern: pattern 2,\nFinal Answer: ignored here");
    transcript->add_turn("Final answer: blue.");
    Gateway gateway(transcript, {});
    InferenceRunner runner(tasks::builtin("shoe_sales"), shoe_config(), gateway);

    const std::vector<Hypothesis> selected = {
        scored("h1", "Customers buy shoes that match the color of their shirt.", 9, 10),
        scored("h2", "Customers buy shoes that match the color of their hat.", 6, 10),
    };
    auto rec = runner.adaptive_two_step(selected, shoe_customer("c1", "blue", "blue", "red"));
    CHECK(rec.chosen_hypothesis_ids == std::vector<std::string>{"h2"});
    CHECK(rec.parsed_label == "blue");
    CHECK(rec.verdict);
}

TEST_CASE("an unparseable pattern choice falls back to best accuracy", "[inference]") {
    const std::vector<Hypothesis> selected = {
        scored("h1", "Customers buy shoes that match the color of their shirt.", 9, 10),
        scored("h2", "Customers buy shoes that match the color of their hat.", 6, 10),
    };

    SECTION("no pattern number at all") {
        auto transcript = std::make_shared<TranscriptBackend>();
        transcript->add_turn("I really could not decide.");
        transcript->add_turn("Final answer: red.");
        Gateway gateway(transcript, {});
        InferenceRunner runner(tasks::builtin("shoe_sales"), shoe_config(), gateway);
        auto rec = runner.adaptive_two_step(selected, shoe_customer("c1", "red", "blue", "blue"));
        CHECK(rec.chosen_hypothesis_ids == std::vector<std::string>{"h1"});
        CHECK(rec.verdict);
    }
    SECTION("pattern number out of range") {
        auto transcript = std::make_shared<TranscriptBackend>();
        transcript->add_turn("Chosen pattern: pattern 7.");
        transcript->add_turn("Final answer: red.");
        Gateway gateway(transcript, {});
        InferenceRunner runner(tasks::builtin("shoe_sales"), shoe_config(), gateway);
        auto rec = runner.adaptive_two_step(selected, shoe_customer("c1", "red", "blue", "blue"));
        CHECK(rec.chosen_hypothesis_ids == std::vector<std::string>{"h1"});
    }
}

TEST_CASE("a one-rule bank makes every strategy agree", "[inference]") {
    Gateway gateway(make_rule_backend("shoe_sales"), {});
    auto cfg = shoe_config();
    cfg.inference_top_n = 1;
    InferenceRunner runner(tasks::builtin("shoe_sales"), cfg, gateway);

    HypothesisBank bank;
    bank.capacity = 1;
    bank.entries = {
        scored("h1", "Customers buy shoes that match the color of their shirt.", 9, 10)};

    const std::vector<Example> test = {shoe_customer("c1", "red", "blue", "green"),
                                       shoe_customer("c2", "black", "white", "black"),
                                       shoe_customer("c3", "orange", "orange", "blue")};
    const auto reference = runner.run(Strategy::BestAccuracy, bank, test);
    for (auto s : {Strategy::FilterWeightedVote, Strategy::AdaptiveOneStep,
                   Strategy::AdaptiveTwoStep}) {
        const auto records = runner.run(s, bank, test);
        REQUIRE(records.size() == reference.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            INFO(strategy_name(s) << " on " << records[i].example_id);
            CHECK(records[i].parsed_label == reference[i].parsed_label);
            CHECK(records[i].verdict == reference[i].verdict);
        }
    }
}

TEST_CASE("the oracle scores a hit when any selected rule is right", "[inference]") {
    Gateway gateway(make_rule_backend("shoe_sales"), {});
    InferenceRunner runner(tasks::builtin("shoe_sales"), shoe_config(), gateway);

    const std::vector<Hypothesis> top_n = {
        scored("h1", "Customers buy shoes that match the color of their hat.", 6, 10),
        scored("h2", "Customers buy shoes that match the color of their bag.", 5, 10),
    };
    // c1: only the hat matches; c2: only the bag; c3: neither.
    const std::vector<Example> test = {shoe_customer("c1", "red", "red", "blue"),
                                       shoe_customer("c2", "green", "white", "green"),
                                       shoe_customer("c3", "black", "white", "orange")};

    std::vector<std::vector<PredictionRecord>> per_hyp;
    const double oracle = runner.oracle_inference(top_n, test, &per_hyp);
    CHECK(oracle == Approx(2.0 / 3));
    REQUIRE(per_hyp.size() == 2);
    for (const auto& row : per_hyp) {
        double single = 0;
        for (const auto& rec : row) single += rec.verdict ? 1 : 0;
        CHECK(single / test.size() <= oracle);
    }

    HypothesisBank bank;
    bank.capacity = 3;
    bank.entries = top_n;
    const auto records = runner.run(Strategy::Oracle, bank, test);
    REQUIRE(records.size() == 3);
    CHECK(records[0].verdict);
    CHECK(records[0].chosen_hypothesis_ids == std::vector<std::string>{"h1"});
    CHECK(records[1].verdict);
    CHECK(records[1].chosen_hypothesis_ids == std::vector<std::string>{"h2"});
    CHECK_FALSE(records[2].verdict);
    CHECK(records[2].chosen_hypothesis_ids.empty());
}

TEST_CASE("strategy names round trip", "[inference]") {
    for (auto s : {Strategy::BestAccuracy, Strategy::FilterWeightedVote,
                   Strategy::AdaptiveOneStep, Strategy::AdaptiveTwoStep, Strategy::Oracle})
        CHECK(strategy_from_name(strategy_name(s)) == s);
    CHECK_THROWS_AS(strategy_from_name("majority_vote"), DomainError);
}

TEST_CASE("prediction records round trip through JSON", "[inference]") {
    PredictionRecord r;
    r.example_id = "e9";
    r.strategy = "best_accuracy";
    r.chosen_hypothesis_ids = {"h1", "h2"};
    r.raw_llm_text = "Final answer: red.";
    r.parsed_label = "red";
    r.gold_label = "blue";
    r.verdict = false;
    nlohmann::json j = r;
    auto back = j.get<PredictionRecord>();
    CHECK(nlohmann::json(back).dump() == j.dump());

    r.parsed_label = std::nullopt;
    j = r;
    back = j.get<PredictionRecord>();
    CHECK_FALSE(back.parsed_label.has_value());
}
