#include "hypgen/rule_backends.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <regex>
#include <sstream>
#include <vector>

#include "hypgen/domain.hpp"
#include "hypgen/util.hpp"

namespace hypgen {

namespace {

enum class PromptKind { Generation, Inference, Relevance, Adaptive, ZeroFewShot };

PromptKind classify(const PromptPair& prompt) {
    if (prompt.instruction.find("Reasoning for choosing pattern") != std::string::npos)
        return PromptKind::Adaptive;
    if (prompt.user.find("Is the pattern relevant") != std::string::npos)
        return PromptKind::Relevance;
    if (prompt.user.find("learned pattern:") != std::string::npos ||
        prompt.user.find("Learned pattern:") != std::string::npos)
        return PromptKind::Inference;
    if (prompt.user.find("hypotheses") != std::string::npos) return PromptKind::Generation;
    return PromptKind::ZeroFewShot;
}

std::size_t requested_hypotheses(const std::string& user) {
    static const std::regex re(R"(propose (\d+) possible)", std::regex::icase);
    std::smatch m;
    if (std::regex_search(user, m, re)) return std::stoul(m[1].str());
    return 1;
}

std::string first_capture(const std::string& text, const std::regex& re) {
    std::smatch m;
    if (std::regex_search(text, m, re)) return m[1].str();
    return {};
}

// Adaptive prompts list demonstration examples before the test example, so
// payload fields are read from the last occurrence.
std::string last_capture(const std::string& text, const std::regex& re) {
    std::string out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it)
        out = (*it)[1].str();
    return out;
}

std::vector<std::string> all_captures(const std::string& text, const std::regex& re) {
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it)
        out.push_back((*it)[1].str());
    return out;
}

std::string extract_pattern(const std::string& user) {
    static const std::regex re(R"([Ll]earned pattern: ([^\n]+))");
    return first_capture(user, re);
}

// Patterns listed in an adaptive info block, as "Pattern N: text".
std::vector<std::string> extract_adaptive_patterns(const std::string& user) {
    static const std::regex re(R"(Pattern \d+: ([^\n]+))");
    return all_captures(user, re);
}

std::string numbered_list(const std::vector<std::string>& items, std::size_t n) {
    std::ostringstream os;
    for (std::size_t i = 0; i < std::min(n, items.size()); ++i)
        os << (i + 1) << ". " << items[i] << "\n";
    return os.str();
}

bool mentions(const std::string& text, const std::string& word) {
    const std::string lower = to_lower(text);
    const auto is_word = [](unsigned char c) { return std::isalnum(c) != 0; };
    for (std::size_t pos = lower.find(word); pos != std::string::npos;
         pos = lower.find(word, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word(lower[pos - 1]);
        const std::size_t end = pos + word.size();
        const bool right_ok = end == lower.size() || !is_word(lower[end]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

/// Shared skeleton: distractors always, plus the true rule once the prompt's
/// observations show >= evidence_needed counterexamples. Stateless across
/// calls so a resumed run sees exactly the responses the original run saw.
class RuleBackendBase : public LlmBackend {
public:
    std::string complete(const std::string&, const PromptPair& prompt,
                         const DecodingParams&) override {
        std::lock_guard lock(mutex_);
        switch (classify(prompt)) {
            case PromptKind::Generation: {
                const std::size_t n = requested_hypotheses(prompt.user);
                std::vector<std::string> items = distractors();
                if (evidence_count(prompt.user) >= evidence_needed_)
                    items.insert(items.begin(), true_rule());
                return numbered_list(items, n);
            }
            case PromptKind::Inference:
                return apply_pattern(extract_pattern(prompt.user), prompt.user);
            case PromptKind::Relevance:
                return pattern_is_relevant(extract_pattern(prompt.user))
                           ? "Final answer: yes."
                           : "Final answer: no.";
            case PromptKind::Adaptive: {
                const auto patterns = extract_adaptive_patterns(prompt.user);
                std::size_t choice = 0;
                for (std::size_t i = 0; i < patterns.size(); ++i)
                    if (mentions(patterns[i], decisive_word())) {
                        choice = i;
                        break;
                    }
                const std::string pattern = patterns.empty() ? "" : patterns[choice];
                return "Reasoning for choosing pattern: closest examples,\nChosen pattern: "
                       "pattern " +
                       std::to_string(choice + 1) +
                       ",\nReasoning for choice of prediction: applied pattern,\n" +
                       apply_pattern(pattern, prompt.user);
            }
            case PromptKind::ZeroFewShot:
                return zero_few_shot_answer(prompt.user);
        }
        return {};
    }

protected:
    virtual std::vector<std::string> distractors() const = 0;
    virtual std::string true_rule() const = 0;
    virtual std::string decisive_word() const = 0;
    virtual std::size_t evidence_count(const std::string& user) const = 0;
    virtual bool pattern_is_relevant(const std::string& pattern) const = 0;
    // Returns the full answer text ending in the task's final-answer format.
    virtual std::string apply_pattern(const std::string& pattern,
                                      const std::string& user) const = 0;
    virtual std::string zero_few_shot_answer(const std::string& user) const = 0;

    std::size_t evidence_needed_ = 3;

private:
    std::mutex mutex_;
};

// --- shoe_sales: label is the shirt color ---

class ShoeRuleBackend : public RuleBackendBase {
protected:
    std::vector<std::string> distractors() const override {
        return {"Customers buy shoes that match the color of their hat.",
                "Customers buy shoes that match the color of their bag.",
                "Older customers prefer black shoes and younger customers prefer white "
                "shoes."};
    }
    std::string true_rule() const override {
        return "Customers buy shoes that match the color of their shirt.";
    }
    std::string decisive_word() const override { return "shirt"; }

    // Counts observations whose hat color disagrees with the shirt color:
    // exactly the examples that falsify the leading distractor.
    std::size_t evidence_count(const std::string& user) const override {
        static const std::regex hat(R"(hat color (\w+))");
        static const std::regex shirt(R"(shirt color (\w+))");
        const auto hats = all_captures(user, hat);
        const auto shirts = all_captures(user, shirt);
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < std::min(hats.size(), shirts.size()); ++i)
            if (hats[i] != shirts[i]) ++mismatches;
        return mismatches;
    }

    bool pattern_is_relevant(const std::string& pattern) const override {
        return mentions(pattern, "shirt") || mentions(pattern, "hat") ||
               mentions(pattern, "bag");
    }

    std::string apply_pattern(const std::string& pattern,
                              const std::string& user) const override {
        static const std::regex shirt(R"(shirt color (\w+))");
        static const std::regex hat(R"(hat color (\w+))");
        static const std::regex bag(R"(bag color (\w+))");
        static const std::regex age(R"(age (\d+))");
        std::string answer = "white";
        if (mentions(pattern, "shirt"))
            answer = last_capture(user, shirt);
        else if (mentions(pattern, "hat"))
            answer = last_capture(user, hat);
        else if (mentions(pattern, "bag"))
            answer = last_capture(user, bag);
        else if (mentions(pattern, "older")) {
            const std::string a = last_capture(user, age);
            answer = (!a.empty() && std::stol(a) > 40) ? "black" : "white";
        }
        if (answer.empty()) answer = "white";
        return "Final answer: " + answer + ".";
    }

    std::string zero_few_shot_answer(const std::string& user) const override {
        // Few-shot prompts carry demonstrations; pretend they taught the hat
        // heuristic. Zero-shot declines.
        if (user.find("Here are some examples") == std::string::npos)
            return "Final answer: unknown.";
        static const std::regex hat(R"(hat color (\w+))");
        const auto hats = all_captures(user, hat);
        return "Final answer: " + (hats.empty() ? "white" : hats.back()) + ".";
    }
};

// --- deceptive_reviews: reviews with an exclamation mark are deceptive ---

class ReviewRuleBackend : public RuleBackendBase {
public:
    ReviewRuleBackend() { evidence_needed_ = 2; }

protected:
    std::vector<std::string> distractors() const override {
        return {"Short reviews are more likely to be deceptive.",
                "Reviews that mention staff by role are more likely to be truthful."};
    }
    std::string true_rule() const override {
        return "Reviews written with exclamation marks are more likely to be deceptive.";
    }
    std::string decisive_word() const override { return "exclamation"; }

    std::size_t evidence_count(const std::string& user) const override {
        // Observations where the exclamation rule explains the label.
        static const std::regex re(R"(Review: ([^\n]+)\nObservation: this review is (\w+))");
        std::size_t n = 0;
        for (auto it = std::sregex_iterator(user.begin(), user.end(), re);
             it != std::sregex_iterator(); ++it) {
            const bool bang = (*it)[1].str().find('!') != std::string::npos;
            const bool deceptive = (*it)[2].str() == "deceptive";
            if (bang == deceptive) ++n;
        }
        return n;
    }

    bool pattern_is_relevant(const std::string& pattern) const override {
        return mentions(pattern, "exclamation") || mentions(pattern, "short");
    }

    std::string apply_pattern(const std::string& pattern,
                              const std::string& user) const override {
        static const std::regex review(R"(review is the following: ([^\n]+))");
        const std::string text = first_capture(user, review);
        std::string answer = "truthful";
        if (mentions(pattern, "exclamation"))
            answer = text.find('!') != std::string::npos ? "deceptive" : "truthful";
        else if (mentions(pattern, "short"))
            answer = text.size() < 90 ? "deceptive" : "truthful";
        return "Final answer: " + answer;
    }

    std::string zero_few_shot_answer(const std::string&) const override {
        return "Final answer: truthful";
    }
};

// --- headline_popularity: the headline with a digit gets more clicks ---

class HeadlineRuleBackend : public RuleBackendBase {
public:
    HeadlineRuleBackend() { evidence_needed_ = 2; }

protected:
    std::vector<std::string> distractors() const override {
        return {"Longer headlines get more clicks.",
                "Headlines that ask a question get more clicks."};
    }
    std::string true_rule() const override {
        return "Headlines that contain a number get more clicks.";
    }
    std::string decisive_word() const override { return "number"; }

    std::size_t evidence_count(const std::string& user) const override {
        static const std::regex re(
            R"(Headline 1: ([^\n]+)\nHeadline 2: ([^\n]+)\nObservation: (Headline \d))");
        std::size_t n = 0;
        for (auto it = std::sregex_iterator(user.begin(), user.end(), re);
             it != std::sregex_iterator(); ++it) {
            const bool d1 = (*it)[1].str().find_first_of("0123456789") != std::string::npos;
            const bool d2 = (*it)[2].str().find_first_of("0123456789") != std::string::npos;
            if (d1 == d2) continue;
            const std::string winner = d1 ? "Headline 1" : "Headline 2";
            if ((*it)[3].str() == winner) ++n;
        }
        return n;
    }

    bool pattern_is_relevant(const std::string& pattern) const override {
        return mentions(pattern, "number") || mentions(pattern, "longer");
    }

    std::string apply_pattern(const std::string& pattern,
                              const std::string& user) const override {
        static const std::regex h1(R"(Headline 1: ([^\n]+))");
        static const std::regex h2(R"(Headline 2: ([^\n]+))");
        const std::string a = last_capture(user, h1);
        const std::string b = last_capture(user, h2);
        int pick = 1;
        if (mentions(pattern, "number")) {
            const bool d1 = a.find_first_of("0123456789") != std::string::npos;
            const bool d2 = b.find_first_of("0123456789") != std::string::npos;
            pick = (d2 && !d1) ? 2 : 1;
        } else if (mentions(pattern, "longer")) {
            pick = b.size() > a.size() ? 2 : 1;
        } else if (mentions(pattern, "question")) {
            pick = (b.find('?') != std::string::npos && a.find('?') == std::string::npos) ? 2
                                                                                          : 1;
        }
        return "Final Answer: Headline " + std::to_string(pick) + ".";
    }

    std::string zero_few_shot_answer(const std::string&) const override {
        return "Answer: Headline 1";
    }
};

// --- tweet_popularity: the tweet with more words gets more retweets ---

class TweetRuleBackend : public RuleBackendBase {
public:
    TweetRuleBackend() { evidence_needed_ = 2; }

protected:
    std::vector<std::string> distractors() const override {
        return {"Tweets with hashtags get retweeted more.",
                "Tweets that start with a capitalized word get retweeted more."};
    }
    std::string true_rule() const override {
        return "The tweet with more words gets retweeted more.";
    }
    std::string decisive_word() const override { return "words"; }

    static std::size_t word_count(const std::string& s) {
        std::istringstream is(s);
        std::string w;
        std::size_t n = 0;
        while (is >> w) ++n;
        return n;
    }

    std::size_t evidence_count(const std::string& user) const override {
        static const std::regex re(
            R"(The first tweet: ([^\n]+)\nThe second tweet: ([^\n]+)\nObservation: the (\w+) tweet)");
        std::size_t n = 0;
        for (auto it = std::sregex_iterator(user.begin(), user.end(), re);
             it != std::sregex_iterator(); ++it) {
            const std::size_t w1 = word_count((*it)[1].str());
            const std::size_t w2 = word_count((*it)[2].str());
            if (w1 == w2) continue;
            const std::string winner = w1 > w2 ? "first" : "second";
            if ((*it)[3].str() == winner) ++n;
        }
        return n;
    }

    bool pattern_is_relevant(const std::string& pattern) const override {
        return mentions(pattern, "words") || mentions(pattern, "hashtag");
    }

    std::string apply_pattern(const std::string& pattern,
                              const std::string& user) const override {
        static const std::regex t1(R"(The first tweet: ([^\n]+))");
        static const std::regex t2(R"(The second tweet: ([^\n]+))");
        const std::string a = last_capture(user, t1);
        const std::string b = last_capture(user, t2);
        std::string pick = "first";
        if (mentions(pattern, "words")) {
            pick = word_count(b) > word_count(a) ? "second" : "first";
        } else if (mentions(pattern, "hashtag")) {
            const bool h1 = a.find('#') != std::string::npos;
            const bool h2 = b.find('#') != std::string::npos;
            pick = (h2 && !h1) ? "second" : "first";
        }
        return "Final answer: the " + pick + " tweet";
    }

    std::string zero_few_shot_answer(const std::string&) const override {
        return "Final answer: the first tweet";
    }
};

}  // namespace

std::shared_ptr<LlmBackend> make_rule_backend(const std::string& task_name) {
    if (task_name == "shoe_sales") return std::make_shared<ShoeRuleBackend>();
    if (task_name == "deceptive_reviews") return std::make_shared<ReviewRuleBackend>();
    if (task_name == "headline_popularity") return std::make_shared<HeadlineRuleBackend>();
    if (task_name == "tweet_popularity") return std::make_shared<TweetRuleBackend>();
    throw DomainError("no rule backend for task: " + task_name);
}

}  // namespace hypgen
