#include "hypgen/domain.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "hypgen/task.hpp"
#include "hypgen/util.hpp"

namespace hypgen {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // strips leading whitespace too
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

const Hypothesis* HypothesisBank::find(const std::string& id) const {
    for (const auto& h : entries) {
        if (h.id == id) return &h;
    }
    return nullptr;
}

bool HypothesisBank::contains_text(const std::string& text) const {
    const std::string key = normalize_text(text);
    return std::any_of(entries.begin(), entries.end(),
                       [&](const Hypothesis& h) { return normalize_text(h.text) == key; });
}

void ExperimentConfig::validate() const {
    if (top_k > bank_capacity) throw std::invalid_argument("top_k exceeds bank_capacity");
    if (inference_top_n > bank_capacity)
        throw std::invalid_argument("inference_top_n exceeds bank_capacity");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma out of [0,1]");
    if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
    if (bank_capacity == 0) throw std::invalid_argument("bank_capacity must be positive");
    if (num_init == 0) throw std::invalid_argument("num_init must be positive");
    if (w_max == 0) throw std::invalid_argument("w_max must be positive");
}

bool TaskDescriptor::has_label(const std::string& label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::optional<std::string> normalize_label(const std::string& raw, const TaskDescriptor& task) {
    const std::string text = normalize_text(raw);
    if (text.empty()) return std::nullopt;

    // Prefer the tail after the last answer marker, if any; answers may be
    // preceded by step-by-step reasoning that mentions other labels.
    std::string region = text;
    for (const char* marker : {"final answer", "chosen answer", "answer:"}) {
        const auto pos = text.rfind(marker);
        if (pos != std::string::npos) {
            region = text.substr(pos);
            break;
        }
    }

    auto last_match = [](const std::string& haystack, const std::regex& re)
        -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (auto it = std::sregex_iterator(haystack.begin(), haystack.end(), re);
             it != std::sregex_iterator(); ++it) {
            best = static_cast<std::size_t>(it->position());
        }
        return best;
    };

    for (const std::string* scan : {const_cast<const std::string*>(&region), &text}) {
        std::optional<std::string> label;
        std::size_t best_pos = 0;
        for (const auto& lp : task.label_patterns) {
            const std::regex re(lp.pattern, std::regex::icase);
            if (auto pos = last_match(*scan, re); pos && (!label || *pos >= best_pos)) {
                best_pos = *pos;
                label = lp.label;
            }
        }
        if (label) return label;
        if (scan == &text) break;  // region fallthrough only once
    }
    return std::nullopt;
}

// --- JSON (stable field names; these are the on-disk schemas) ---

void to_json(nlohmann::json& j, const Payload& p) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SingleText>) {
                j = {{"kind", "single_text"}, {"text", v.text}};
            } else if constexpr (std::is_same_v<T, PairedText>) {
                j = {{"kind", "paired_text"}, {"first", v.first}, {"second", v.second}};
            } else {
                j = {{"kind", "feature_record"}, {"fields", v.fields}};
            }
        },
        p);
}

void from_json(const nlohmann::json& j, Payload& p) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "single_text") {
        p = SingleText{j.at("text").get<std::string>()};
    } else if (kind == "paired_text") {
        p = PairedText{j.at("first").get<std::string>(), j.at("second").get<std::string>()};
    } else if (kind == "feature_record") {
        p = FeatureRecord{j.at("fields").get<std::map<std::string, std::string>>()};
    } else {
        throw DomainError("unknown payload kind: " + kind);
    }
}

void to_json(nlohmann::json& j, const Example& e) {
    j = {{"id", e.id}, {"payload", e.payload}, {"label", e.label}};
}

void from_json(const nlohmann::json& j, Example& e) {
    j.at("id").get_to(e.id);
    j.at("payload").get_to(e.payload);
    j.at("label").get_to(e.label);
}

void to_json(nlohmann::json& j, const EvalLedger& l) {
    j = {{"correct", l.correct},
         {"seen", l.seen},
         {"correct_example_ids", l.correct_example_ids}};
}

void from_json(const nlohmann::json& j, EvalLedger& l) {
    j.at("correct").get_to(l.correct);
    j.at("seen").get_to(l.seen);
    j.at("correct_example_ids").get_to(l.correct_example_ids);
    if (l.seen < l.correct || l.correct < 0)
        throw DomainError("ledger violates seen >= correct >= 0");
    if (static_cast<long>(l.correct_example_ids.size()) != l.correct)
        throw DomainError("ledger correct_example_ids size mismatch");
}

void to_json(nlohmann::json& j, const Hypothesis& h) {
    j = {{"id", h.id},
         {"text", h.text},
         {"created_at_step", h.created_at_step},
         {"ledger", h.ledger}};
}

void from_json(const nlohmann::json& j, Hypothesis& h) {
    j.at("id").get_to(h.id);
    j.at("text").get_to(h.text);
    j.at("created_at_step").get_to(h.created_at_step);
    j.at("ledger").get_to(h.ledger);
    if (trim(h.text).empty()) throw DomainError("hypothesis text is empty");
}

void to_json(nlohmann::json& j, const HypothesisBank& b) {
    j = {{"capacity", b.capacity}, {"entries", b.entries}, {"step", b.step}};
}

void from_json(const nlohmann::json& j, HypothesisBank& b) {
    j.at("capacity").get_to(b.capacity);
    j.at("entries").get_to(b.entries);
    j.at("step").get_to(b.step);
}

void to_json(nlohmann::json& j, const WrongExampleBank& w) {
    j = {{"capacity", w.capacity}, {"items", w.items}};
}

void from_json(const nlohmann::json& j, WrongExampleBank& w) {
    j.at("capacity").get_to(w.capacity);
    j.at("items").get_to(w.items);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = {{"alpha", c.alpha},
         {"bank_capacity", c.bank_capacity},
         {"top_k", c.top_k},
         {"w_max", c.w_max},
         {"num_init", c.num_init},
         {"hyp_per_update", c.hyp_per_update},
         {"gamma", c.gamma},
         {"inference_top_n", c.inference_top_n},
         {"examples_per_hypothesis", c.examples_per_hypothesis},
         {"seed", c.seed},
         {"model", c.model},
         {"inference_model", c.inference_model}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    j.at("alpha").get_to(c.alpha);
    j.at("bank_capacity").get_to(c.bank_capacity);
    j.at("top_k").get_to(c.top_k);
    j.at("w_max").get_to(c.w_max);
    j.at("num_init").get_to(c.num_init);
    j.at("hyp_per_update").get_to(c.hyp_per_update);
    j.at("gamma").get_to(c.gamma);
    j.at("inference_top_n").get_to(c.inference_top_n);
    j.at("examples_per_hypothesis").get_to(c.examples_per_hypothesis);
    j.at("seed").get_to(c.seed);
    j.at("model").get_to(c.model);
    if (j.contains("inference_model")) j.at("inference_model").get_to(c.inference_model);
}

}  // namespace hypgen
