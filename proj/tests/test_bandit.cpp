#include <catch2/catch.hpp>

#include <cmath>
#include <limits>

#include <hypgen/bandit.hpp>

using namespace hypgen;

namespace {

Hypothesis make(const std::string& id, long correct, long seen, long created = 0) {
    Hypothesis h;
    h.id = id;
    h.text = "rule " + id;
    h.created_at_step = created;
    h.ledger.correct = correct;
    h.ledger.seen = seen;
    return h;
}

}  // namespace

TEST_CASE("reward reproduces a hand-computed value", "[bandit]") {
    // accuracy 3/4, t = 16, alpha = 0.5:
    //   0.75 + 0.5 * sqrt(ln 16 / 4) = 1.1662773055788489 (frozen)
    EvalLedger ledger;
    ledger.correct = 3;
    ledger.seen = 4;
    CHECK(bandit::reward(ledger, 16, 0.5) ==
          Approx(1.1662773055788489).epsilon(1e-14));
}

TEST_CASE("reward at t = 1 is the raw accuracy", "[bandit]") {
    EvalLedger ledger;
    ledger.correct = 7;
    ledger.seen = 10;
    CHECK(bandit::reward(ledger, 1, 0.5) == Approx(0.7).epsilon(1e-15));
    CHECK(bandit::reward(ledger, 1, 2.0) == Approx(0.7).epsilon(1e-15));
}

TEST_CASE("unevaluated arms score infinite reward", "[bandit]") {
    EvalLedger fresh;
    CHECK(std::isinf(bandit::reward(fresh, 100, 0.5)));
    EvalLedger seasoned;
    seasoned.correct = 1000;
    seasoned.seen = 1000;
    CHECK(bandit::reward(fresh, 100, 0.5) > bandit::reward(seasoned, 100, 0.5));
}

TEST_CASE("reward rejects steps before the first example", "[bandit]") {
    EvalLedger ledger;
    ledger.seen = 1;
    CHECK_THROWS_AS(bandit::reward(ledger, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(bandit::reward(ledger, -3, 0.5), std::invalid_argument);
}

TEST_CASE("exploration bonus shrinks as an arm accumulates evidence", "[bandit]") {
    // Fixed accuracy 0.75, growing seen: the reward must strictly decrease.
    double prev = std::numeric_limits<double>::infinity();
    for (long n = 1; n <= 50; ++n) {
        EvalLedger ledger;
        ledger.correct = 3 * n;
        ledger.seen = 4 * n;
        const double r = bandit::reward(ledger, 1000, 0.5);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("exploration bonus grows with the global step", "[bandit]") {
    EvalLedger ledger;
    ledger.correct = 1;
    ledger.seen = 2;
    double prev = bandit::reward(ledger, 1, 0.5);
    for (long t = 2; t <= 64; t *= 2) {
        const double r = bandit::reward(ledger, t, 0.5);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("larger alpha never lowers the reward", "[bandit]") {
    EvalLedger ledger;
    ledger.correct = 5;
    ledger.seen = 9;
    CHECK(bandit::reward(ledger, 7, 1.0) > bandit::reward(ledger, 7, 0.5));
    CHECK(bandit::reward(ledger, 7, 0.0) == Approx(ledger.accuracy()));
}

TEST_CASE("ranking falls through reward, accuracy, age, then id", "[bandit]") {
    SECTION("higher reward wins") {
        auto a = make("a", 9, 10);
        auto b = make("b", 1, 10);
        CHECK(bandit::outranks(a, b, 5, 0.5));
        CHECK_FALSE(bandit::outranks(b, a, 5, 0.5));
    }
    SECTION("equal (infinite) reward falls through to accuracy, then age") {
        auto young = make("y", 0, 0, 7);
        auto old = make("o", 0, 0, 3);
        CHECK(bandit::outranks(old, young, 5, 0.5));
        CHECK_FALSE(bandit::outranks(young, old, 5, 0.5));
    }
    SECTION("identical stats break the tie on id, ascending") {
        auto a = make("h0001", 3, 4, 2);
        auto b = make("h0002", 3, 4, 2);
        CHECK(bandit::outranks(a, b, 5, 0.5));
        CHECK_FALSE(bandit::outranks(b, a, 5, 0.5));
    }
    SECTION("ranking is antisymmetric for distinct arms") {
        auto a = make("a", 2, 3, 1);
        auto b = make("b", 5, 8, 2);
        for (long t : {1L, 2L, 17L, 400L})
            CHECK(bandit::outranks(a, b, t, 0.5) != bandit::outranks(b, a, t, 0.5));
    }
}

TEST_CASE("top_k returns ids in rank order and rejects oversized k", "[bandit]") {
    HypothesisBank bank;
    bank.capacity = 4;
    bank.step = 10;
    bank.entries = {make("h1", 1, 10), make("h2", 9, 10), make("h3", 5, 10)};
    CHECK(bandit::top_k(bank, 2, 0.5) == std::vector<std::string>{"h2", "h3"});
    CHECK(bandit::top_k(bank, 3, 0.5) == std::vector<std::string>{"h2", "h3", "h1"});
    CHECK_THROWS_AS(bandit::top_k(bank, 4, 0.5), std::invalid_argument);
}

TEST_CASE("merge keeps the strongest entries within capacity", "[bandit]") {
    HypothesisBank bank;
    bank.capacity = 2;
    bank.step = 20;
    bank.entries = {make("h1", 18, 20), make("h2", 4, 20)};
    auto merged = bandit::merge_and_truncate(bank, {make("h3", 15, 20)}, 0.5);
    REQUIRE(merged.entries.size() == 2);
    CHECK(merged.entries[0].id == "h1");
    CHECK(merged.entries[1].id == "h3");
}

TEST_CASE("merge drops textual duplicates regardless of case and spacing", "[bandit]") {
    HypothesisBank bank;
    bank.capacity = 5;
    bank.step = 4;
    auto base = make("h1", 4, 4);
    base.text = "Customers buy shoes that match their shirt.";
    bank.entries = {base};

    auto dup = make("h2", 0, 4);
    dup.text = "  customers BUY shoes   that match their shirt.  ";
    auto novel = make("h3", 2, 4);
    novel.text = "Older customers prefer black shoes.";
    auto merged = bandit::merge_and_truncate(bank, {dup, novel}, 0.5);
    REQUIRE(merged.entries.size() == 2);
    CHECK(merged.find("h1") != nullptr);
    CHECK(merged.find("h2") == nullptr);
    CHECK(merged.find("h3") != nullptr);
}

TEST_CASE("merging nothing is a no-op apart from ordering", "[bandit]") {
    HypothesisBank bank;
    bank.capacity = 3;
    bank.step = 6;
    bank.entries = {make("h2", 1, 6), make("h1", 5, 6)};
    auto once = bandit::merge_and_truncate(bank, {}, 0.5);
    auto twice = bandit::merge_and_truncate(once, {}, 0.5);
    REQUIRE(once.entries.size() == 2);
    CHECK(once.entries[0].id == "h1");
    for (std::size_t i = 0; i < once.entries.size(); ++i)
        CHECK(once.entries[i].id == twice.entries[i].id);
}
