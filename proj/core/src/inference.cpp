#include "hypgen/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include "hypgen/tasks.hpp"
#include "hypgen/util.hpp"

namespace hypgen {

namespace {

constexpr double kInferenceTemperature = 0.0;

// Accuracy ordering with the global tie-break (accuracy desc,
// created_at_step asc, id asc).
bool accuracy_outranks(const Hypothesis& a, const Hypothesis& b) {
    if (a.ledger.accuracy() != b.ledger.accuracy())
        return a.ledger.accuracy() > b.ledger.accuracy();
    if (a.created_at_step != b.created_at_step) return a.created_at_step < b.created_at_step;
    return a.id < b.id;
}

std::optional<bool> parse_yes_no(const std::string& raw) {
    const std::string text = normalize_text(raw);
    std::string region = text;
    if (const auto pos = text.rfind("final answer"); pos != std::string::npos)
        region = text.substr(pos);
    const auto yes = region.rfind("yes");
    const auto no = region.rfind("no");
    if (yes == std::string::npos && no == std::string::npos) return std::nullopt;
    if (yes == std::string::npos) return false;
    if (no == std::string::npos) return true;
    return yes > no;
}

std::optional<std::size_t> parse_pattern_choice(const std::string& raw, std::size_t count) {
    static const std::regex re(R"(pattern\s*(?:number\s*)?[:#]?\s*(\d{1,3}))",
                               std::regex::icase);
    std::optional<std::size_t> choice;
    for (auto it = std::sregex_iterator(raw.begin(), raw.end(), re);
         it != std::sregex_iterator(); ++it) {
        const std::size_t n = std::stoul((*it)[1].str());
        if (n >= 1 && n <= count) choice = n - 1;  // out-of-range treated as unparseable
    }
    return choice;
}

}  // namespace

CorrectnessMatrix CorrectnessMatrix::from_hypotheses(
    const std::vector<Hypothesis>& hypotheses) {
    CorrectnessMatrix m;
    std::set<std::string> cols;
    for (const auto& h : hypotheses)
        cols.insert(h.ledger.correct_example_ids.begin(), h.ledger.correct_example_ids.end());
    m.col_ids.assign(cols.begin(), cols.end());
    for (const auto& h : hypotheses) {
        m.row_ids.push_back(h.id);
        std::vector<std::uint8_t> row(m.col_ids.size(), 0);
        for (const auto& id : h.ledger.correct_example_ids) {
            const auto it = std::lower_bound(m.col_ids.begin(), m.col_ids.end(), id);
            row[static_cast<std::size_t>(it - m.col_ids.begin())] = 1;
        }
        m.bits.push_back(std::move(row));
    }
    return m;
}

double row_cosine(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    long dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] & b[i];
        na += a[i];
        nb += b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
}

std::vector<std::size_t> prune(const CorrectnessMatrix& matrix,
                               const std::vector<double>& accuracies, double gamma) {
    const std::size_t n = matrix.bits.size();
    if (n == 0 || n != accuracies.size())
        throw DomainError("prune: matrix/accuracy size mismatch");
    if (gamma < 0.0 || gamma > 1.0) throw DomainError("prune: gamma out of [0,1]");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (accuracies[a] != accuracies[b]) return accuracies[a] > accuracies[b];
        return matrix.row_ids[a] < matrix.row_ids[b];
    });

    std::vector<std::vector<double>> sim(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sim[i][j] = row_cosine(matrix.bits[order[i]], matrix.bits[order[j]]);

    // Suffix accuracy sums for the branch-and-bound cut.
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i > 0; --i) suffix[i - 1] = suffix[i] + accuracies[order[i - 1]];

    std::vector<std::size_t> best, current;
    double best_value = -1.0, current_value = 0.0;

    // Include-first DFS: with ties on objective value, the first subset found
    // (greedy on the accuracy ordering) is kept.
    std::function<void(std::size_t)> visit = [&](std::size_t pos) {
        if (current_value + suffix[pos] <= best_value) return;
        if (pos == n) {
            if (current_value > best_value) {
                best_value = current_value;
                best = current;
            }
            return;
        }
        const bool compatible = std::all_of(current.begin(), current.end(), [&](std::size_t i) {
            return sim[i][pos] <= gamma;
        });
        if (compatible) {
            current.push_back(pos);
            current_value += accuracies[order[pos]];
            visit(pos + 1);
            current_value -= accuracies[order[pos]];
            current.pop_back();
        }
        visit(pos + 1);
    };
    visit(0);

    std::vector<std::size_t> selected;
    selected.reserve(best.size());
    for (std::size_t i : best) selected.push_back(order[i]);
    return selected;
}

const Hypothesis& best_accuracy(const HypothesisBank& bank) {
    if (bank.entries.empty()) throw DomainError("best_accuracy: empty bank");
    const Hypothesis* best = nullptr;
    for (const auto& h : bank.entries) {
        if (h.ledger.seen == 0) throw DomainError("best_accuracy: unevaluated hypothesis");
        if (!best || accuracy_outranks(h, *best)) best = &h;
    }
    return *best;
}

std::vector<Hypothesis> top_by_accuracy(const HypothesisBank& bank, std::size_t n) {
    std::vector<Hypothesis> sorted = bank.entries;
    std::stable_sort(sorted.begin(), sorted.end(), accuracy_outranks);
    if (sorted.size() > n) sorted.resize(n);
    return sorted;
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "best_accuracy") return Strategy::BestAccuracy;
    if (name == "filter_weighted_vote") return Strategy::FilterWeightedVote;
    if (name == "adaptive_one_step") return Strategy::AdaptiveOneStep;
    if (name == "adaptive_two_step") return Strategy::AdaptiveTwoStep;
    if (name == "oracle") return Strategy::Oracle;
    throw DomainError("unknown strategy: " + name);
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::BestAccuracy: return "best_accuracy";
        case Strategy::FilterWeightedVote: return "filter_weighted_vote";
        case Strategy::AdaptiveOneStep: return "adaptive_one_step";
        case Strategy::AdaptiveTwoStep: return "adaptive_two_step";
        case Strategy::Oracle: return "oracle";
    }
    throw DomainError("unknown strategy");
}

void to_json(nlohmann::json& j, const PredictionRecord& r) {
    j = {{"example_id", r.example_id},
         {"strategy", r.strategy},
         {"chosen_hypothesis_ids", r.chosen_hypothesis_ids},
         {"raw_llm_text", r.raw_llm_text},
         {"parsed_label", r.parsed_label ? nlohmann::json(*r.parsed_label) : nlohmann::json()},
         {"gold_label", r.gold_label},
         {"verdict", r.verdict}};
}

void from_json(const nlohmann::json& j, PredictionRecord& r) {
    j.at("example_id").get_to(r.example_id);
    j.at("strategy").get_to(r.strategy);
    j.at("chosen_hypothesis_ids").get_to(r.chosen_hypothesis_ids);
    j.at("raw_llm_text").get_to(r.raw_llm_text);
    if (j.at("parsed_label").is_null())
        r.parsed_label = std::nullopt;
    else
        r.parsed_label = j.at("parsed_label").get<std::string>();
    j.at("gold_label").get_to(r.gold_label);
    j.at("verdict").get_to(r.verdict);
}

InferenceRunner::InferenceRunner(const TaskDescriptor& task, const ExperimentConfig& cfg,
                                 Gateway& gateway, const std::vector<Example>& train_examples)
    : task_(task), cfg_(cfg), gateway_(gateway) {
    for (const auto& e : train_examples) train_by_id_.emplace(e.id, e);
}

PredictionRecord InferenceRunner::predict_with_hypothesis(const Hypothesis& h,
                                                          const Example& example) {
    PredictionRecord rec;
    rec.example_id = example.id;
    rec.gold_label = example.label;
    rec.chosen_hypothesis_ids = {h.id};
    Bindings bindings = tasks::payload_bindings(task_, example);
    bindings["hypothesis_high_reward"] = h.text;
    try {
        const PromptPair prompt = render(task_.inference, bindings);
        rec.raw_llm_text =
            gateway_.complete(cfg_.resolved_inference_model(), prompt, {kInferenceTemperature});
        rec.parsed_label = normalize_label(rec.raw_llm_text, task_);
    } catch (const LlmError& e) {
        rec.raw_llm_text = std::string("<error: ") + e.what() + ">";
    }
    rec.verdict = rec.parsed_label && *rec.parsed_label == example.label;
    return rec;
}

PredictionRecord InferenceRunner::best_accuracy_infer(const HypothesisBank& bank,
                                                      const Example& example) {
    PredictionRecord rec = predict_with_hypothesis(best_accuracy(bank), example);
    rec.strategy = "best_accuracy";
    return rec;
}

bool InferenceRunner::is_relevant(const Hypothesis& h, const Example& example) {
    Bindings bindings = tasks::payload_bindings(task_, example);
    bindings["hypothesis_high_reward"] = h.text;
    try {
        const PromptPair prompt = render(task_.relevance, bindings);
        const std::string raw =
            gateway_.complete(cfg_.resolved_inference_model(), prompt, {kInferenceTemperature});
        return parse_yes_no(raw).value_or(false);  // unparseable counts as irrelevant
    } catch (const LlmError&) {
        return false;
    }
}

PredictionRecord InferenceRunner::filter_weighted_vote(
    const std::vector<Hypothesis>& bank_top_n, const Example& example) {
    if (bank_top_n.empty()) throw DomainError("filter_weighted_vote: no hypotheses");

    std::vector<const Hypothesis*> relevant;
    for (const auto& h : bank_top_n)
        if (is_relevant(h, example)) relevant.push_back(&h);

    if (relevant.empty()) {
        // Nothing deemed relevant: fall back to the best-accuracy hypothesis.
        const Hypothesis* best = &bank_top_n.front();
        for (const auto& h : bank_top_n)
            if (accuracy_outranks(h, *best)) best = &h;
        PredictionRecord rec = predict_with_hypothesis(*best, example);
        rec.strategy = "filter_weighted_vote";
        return rec;
    }

    std::map<std::string, double> votes;  // label -> summed training accuracy
    std::vector<std::string> chosen_ids;
    std::ostringstream raws;
    for (const Hypothesis* h : relevant) {
        const PredictionRecord sub = predict_with_hypothesis(*h, example);
        chosen_ids.push_back(h->id);
        raws << sub.raw_llm_text << "\n---\n";
        if (sub.parsed_label) votes[*sub.parsed_label] += h->ledger.accuracy();
    }

    PredictionRecord rec;
    rec.example_id = example.id;
    rec.gold_label = example.label;
    rec.strategy = "filter_weighted_vote";
    rec.chosen_hypothesis_ids = std::move(chosen_ids);
    rec.raw_llm_text = raws.str();
    for (const auto& [label, weight] : votes) {
        // std::map iterates labels ascending, so ties keep the smaller label.
        if (!rec.parsed_label || weight > votes[*rec.parsed_label]) rec.parsed_label = label;
    }
    rec.verdict = rec.parsed_label && *rec.parsed_label == example.label;
    return rec;
}

std::string InferenceRunner::adaptive_info_block(
    const std::vector<Hypothesis>& selected) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        os << "Pattern " << (i + 1) << ": " << selected[i].text << "\n";
        // Most recent correct examples first.
        const auto& ids = selected[i].ledger.correct_example_ids;
        std::size_t shown = 0;
        for (auto it = ids.rbegin();
             it != ids.rend() && shown < cfg_.examples_per_hypothesis; ++it) {
            const auto found = train_by_id_.find(*it);
            if (found == train_by_id_.end()) continue;
            os << "Example " << (shown + 1) << ": "
               << tasks::observation_text(task_, found->second, true) << "\n";
            ++shown;
        }
        os << "\n";
    }
    return os.str();
}

PredictionRecord InferenceRunner::adaptive_one_step(const std::vector<Hypothesis>& selected,
                                                    const Example& example) {
    if (selected.empty()) throw DomainError("adaptive_one_step: no hypotheses");
    PredictionRecord rec;
    rec.example_id = example.id;
    rec.gold_label = example.label;
    rec.strategy = "adaptive_one_step";

    Bindings bindings = tasks::payload_bindings(task_, example);
    bindings["adaptive_info_prompt"] = adaptive_info_block(selected);
    try {
        const PromptPair prompt = render(task_.adaptive, bindings);
        rec.raw_llm_text =
            gateway_.complete(cfg_.resolved_inference_model(), prompt, {kInferenceTemperature});
        rec.parsed_label = normalize_label(rec.raw_llm_text, task_);
    } catch (const LlmError& e) {
        rec.raw_llm_text = std::string("<error: ") + e.what() + ">";
    }
    if (const auto choice = parse_pattern_choice(rec.raw_llm_text, selected.size()))
        rec.chosen_hypothesis_ids = {selected[*choice].id};
    else
        for (const auto& h : selected) rec.chosen_hypothesis_ids.push_back(h.id);
    rec.verdict = rec.parsed_label && *rec.parsed_label == example.label;
    return rec;
}

PredictionRecord InferenceRunner::adaptive_two_step(const std::vector<Hypothesis>& selected,
                                                    const Example& example) {
    if (selected.empty()) throw DomainError("adaptive_two_step: no hypotheses");

    Bindings bindings = tasks::payload_bindings(task_, example);
    bindings["adaptive_info_prompt"] = adaptive_info_block(selected);
    std::string choice_raw;
    std::optional<std::size_t> choice;
    try {
        const PromptPair prompt = render(task_.adaptive, bindings);
        choice_raw =
            gateway_.complete(cfg_.resolved_inference_model(), prompt, {kInferenceTemperature});
        choice = parse_pattern_choice(choice_raw, selected.size());
    } catch (const LlmError& e) {
        choice_raw = std::string("<error: ") + e.what() + ">";
    }

    const Hypothesis* chosen;
    if (choice) {
        chosen = &selected[*choice];
    } else {
        // Unparseable choice: fall back to the best-accuracy hypothesis.
        chosen = &selected.front();
        for (const auto& h : selected)
            if (accuracy_outranks(h, *chosen)) chosen = &h;
    }

    PredictionRecord rec = predict_with_hypothesis(*chosen, example);
    rec.strategy = "adaptive_two_step";
    rec.raw_llm_text = choice_raw + "\n---\n" + rec.raw_llm_text;
    return rec;
}

double InferenceRunner::oracle_inference(
    const std::vector<Hypothesis>& bank_top_n, const std::vector<Example>& test,
    std::vector<std::vector<PredictionRecord>>* per_hypothesis) {
    if (bank_top_n.empty()) throw DomainError("oracle_inference: no hypotheses");
    std::vector<std::vector<PredictionRecord>> records;
    for (const auto& h : bank_top_n) {
        std::vector<PredictionRecord> row;
        row.reserve(test.size());
        for (const auto& e : test) row.push_back(predict_with_hypothesis(h, e));
        records.push_back(std::move(row));
    }
    std::size_t correct = 0;
    for (std::size_t c = 0; c < test.size(); ++c)
        for (const auto& row : records)
            if (row[c].verdict) {
                ++correct;
                break;
            }
    if (per_hypothesis) *per_hypothesis = std::move(records);
    return test.empty() ? 0.0 : static_cast<double>(correct) / test.size();
}

std::vector<Hypothesis> InferenceRunner::pruned_selection(const HypothesisBank& bank) const {
    const auto top_n = top_by_accuracy(bank, cfg_.inference_top_n);
    const auto matrix = CorrectnessMatrix::from_hypotheses(top_n);
    std::vector<double> accuracies;
    for (const auto& h : top_n) accuracies.push_back(h.ledger.accuracy());
    std::vector<Hypothesis> selected;
    for (std::size_t i : prune(matrix, accuracies, cfg_.gamma)) selected.push_back(top_n[i]);
    return selected;
}

std::vector<PredictionRecord> InferenceRunner::run(Strategy strategy,
                                                   const HypothesisBank& bank,
                                                   const std::vector<Example>& test) {
    std::vector<PredictionRecord> out;
    out.reserve(test.size());
    switch (strategy) {
        case Strategy::BestAccuracy: {
            const Hypothesis h = best_accuracy(bank);
            for (const auto& e : test) {
                PredictionRecord rec = predict_with_hypothesis(h, e);
                rec.strategy = "best_accuracy";
                out.push_back(std::move(rec));
            }
            break;
        }
        case Strategy::FilterWeightedVote: {
            const auto top_n = top_by_accuracy(bank, cfg_.inference_top_n);
            for (const auto& e : test) out.push_back(filter_weighted_vote(top_n, e));
            break;
        }
        case Strategy::AdaptiveOneStep: {
            const auto selected = pruned_selection(bank);
            for (const auto& e : test) out.push_back(adaptive_one_step(selected, e));
            break;
        }
        case Strategy::AdaptiveTwoStep: {
            const auto selected = pruned_selection(bank);
            for (const auto& e : test) out.push_back(adaptive_two_step(selected, e));
            break;
        }
        case Strategy::Oracle: {
            const auto top_n = top_by_accuracy(bank, cfg_.inference_top_n);
            std::vector<std::vector<PredictionRecord>> per_hyp;
            oracle_inference(top_n, test, &per_hyp);
            for (std::size_t c = 0; c < test.size(); ++c) {
                PredictionRecord rec;
                rec.example_id = test[c].id;
                rec.gold_label = test[c].label;
                rec.strategy = "oracle";
                for (std::size_t r = 0; r < per_hyp.size(); ++r) {
                    if (per_hyp[r][c].verdict) {
                        rec.chosen_hypothesis_ids.push_back(top_n[r].id);
                        rec.verdict = true;
                    }
                }
                rec.parsed_label = rec.verdict
                                       ? std::optional<std::string>(test[c].label)
                                       : per_hyp.front()[c].parsed_label;
                out.push_back(std::move(rec));
            }
            break;
        }
    }
    return out;
}

}  // namespace hypgen
