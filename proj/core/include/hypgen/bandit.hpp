#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypgen/domain.hpp"
#include "hypgen/util.hpp"

namespace hypgen::bandit {

/// UCB reward: accuracy + alpha * sqrt(ln(t) / seen). Natural log.
/// seen == 0 returns +inf so never-evaluated arms are tried first; the engine
/// reward-initializes new hypotheses before they compete, so the sentinel
/// only matters transiently.
inline double reward(const EvalLedger& ledger, long t, double alpha) {
    if (t < 1) throw std::invalid_argument("reward: step t must be >= 1");
    if (ledger.seen == 0) return std::numeric_limits<double>::infinity();
    return ledger.accuracy() +
           alpha * std::sqrt(std::log(static_cast<double>(t)) / ledger.seen);
}

/// Global tie-break: reward desc, accuracy desc, created_at_step asc, id asc.
/// Returns true when `a` outranks `b`.
inline bool outranks(const Hypothesis& a, const Hypothesis& b, long t, double alpha) {
    const double ra = reward(a.ledger, t, alpha);
    const double rb = reward(b.ledger, t, alpha);
    if (ra != rb) return ra > rb;
    if (a.ledger.accuracy() != b.ledger.accuracy())
        return a.ledger.accuracy() > b.ledger.accuracy();
    if (a.created_at_step != b.created_at_step) return a.created_at_step < b.created_at_step;
    return a.id < b.id;
}

/// Ids of the k highest-reward entries at the bank's current step, descending.
inline std::vector<std::string> top_k(const HypothesisBank& bank, std::size_t k, double alpha) {
    if (k > bank.entries.size())
        throw std::invalid_argument("top_k: k exceeds bank size");
    std::vector<const Hypothesis*> order;
    order.reserve(bank.entries.size());
    for (const auto& h : bank.entries) order.push_back(&h);
    std::stable_sort(order.begin(), order.end(),
                     [&](const Hypothesis* a, const Hypothesis* b) {
                         return outranks(*a, *b, bank.step, alpha);
                     });
    std::vector<std::string> ids;
    ids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) ids.push_back(order[i]->id);
    return ids;
}

/// Union of old entries and deduplicated new ones, cut to the top `capacity`
/// by reward at the bank's current step. New entries whose normalized text
/// matches an existing (or earlier new) entry are dropped.
inline HypothesisBank merge_and_truncate(const HypothesisBank& bank,
                                         const std::vector<Hypothesis>& fresh,
                                         double alpha) {
    HypothesisBank merged = bank;
    for (const auto& h : fresh) {
        if (!merged.contains_text(h.text)) merged.entries.push_back(h);
    }
    std::stable_sort(merged.entries.begin(), merged.entries.end(),
                     [&](const Hypothesis& a, const Hypothesis& b) {
                         return outranks(a, b, merged.step, alpha);
                     });
    if (merged.entries.size() > merged.capacity) merged.entries.resize(merged.capacity);
    return merged;
}

}  // namespace hypgen::bandit
