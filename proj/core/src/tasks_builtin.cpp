// Built-in task descriptors: label sets, answer-format regexes, and the
// prompt template set for each task. Placeholders use <name> syntax and are
// resolved by render().

#include "hypgen/tasks.hpp"

namespace hypgen::tasks {

namespace {

constexpr const char* kNumberedListFormat =
    "Please generate them in the format of 1. [hypothesis], 2. [hypothesis], ... "
    "<num_hypotheses>. [hypothesis].\n";

TaskDescriptor make_shoe_sales() {
    TaskDescriptor t;
    t.name = "shoe_sales";
    t.payload_kind = PayloadKind::FeatureRecord;
    t.labels = {"white", "red", "orange", "green", "blue", "black"};
    for (const auto& c : t.labels) t.label_patterns.push_back({"\\b" + c + "\\b", c});

    t.generation.instruction =
        "You're a helpful assistant. Your task is given as follows:\n"
        "Given a set of observations, we want to generate hypotheses that are useful for "
        "predicting the color of the shoes given the appearance of the person.\n"
        "Please be concise and keep the hypotheses to be one-sentence long.\n" +
        std::string(kNumberedListFormat) +
        "Only propose <num_hypotheses> possible hypotheses in total.\n"
        "No need to explain the hypotheses.";
    t.generation.user =
        "We made some observations:\n"
        "<observations>\n"
        "Based on the above observations, generate <num_hypotheses> hypotheses.\n"
        "Please be concise and keep the hypotheses to be one-sentence long.\n" +
        std::string(kNumberedListFormat) +
        "Only propose <num_hypotheses> possible hypotheses in total.";

    t.inference.instruction =
        "You are a shoe salesman and want to recommend shoes to customers. There are white, "
        "red, orange, green, blue, and black shoes.\n"
        "From past experiences, you learned some patterns.\n"
        "Now, at each time, you should apply the learned pattern, given below, to a new "
        "customer and recommend a shoe color.\n"
        "Give an answer for the shoe color recommendation. The answer should be one color "
        "word. It has to be one of white, red, orange, green, blue, and black.\n"
        "Give your final answer in the format of \"Final answer: [answer].\"";
    t.inference.user =
        "Our learned pattern: <hypothesis_high_reward>\n"
        "New customer: <appearance> is buying a pair of shoes, the shoes should be which "
        "color?\n"
        "Answer:";

    t.zero_shot.instruction =
        "You are a shoe salesman and want to recommend shoes to customers. There are white, "
        "red, orange, green, blue, and black shoes.\n"
        "Give your answer for the shoe color recommendation. The answer should be one color "
        "word. It has to be one of white, red, orange, green, blue, and black. If you do not "
        "have enough information to make a recommendation, you should give the answer "
        "\"unknown\".\n"
        "Give your final answer in the format of \"Final answer: [answer].\"";
    t.zero_shot.user =
        "New customer: <appearance> is buying a pair of shoes, the shoes should be which "
        "color?\n"
        "Answer:";

    t.few_shot = t.zero_shot;
    t.few_shot.user =
        "Here are some examples of customers with certain features buying certain products:\n"
        "<demonstrations>\n" +
        t.zero_shot.user;

    t.adaptive.instruction =
        "You are a shoe salesman and want to recommend shoes to customers. There are white, "
        "red, orange, green, blue, and black shoes.\n"
        "From past experiences, you learned some patterns.\n"
        "For each pattern, you will also see a couple of examples that worked for each "
        "pattern.\n"
        "Choose a pattern. To do this, look at the examples of each pattern, and see which "
        "of the examples the current customer is closest to. Choose the pattern "
        "corresponding to that example.\n"
        "Give an answer for the shoe color recommendation.\n"
        "The answer should be one word. It has to be one of white, red, orange, green, "
        "blue, and black.\n"
        "Give your final answer in the following format:\n"
        "Reasoning for choosing pattern: reason,\n"
        "Chosen pattern: pattern,\n"
        "Reasoning for choice of prediction: reason,\n"
        "Final Answer: answer";
    t.adaptive.user =
        "Here are some previously generated patterns with some example where it predicted "
        "correctly what color of shoe the customer bought.\n"
        "<adaptive_info_prompt>\n"
        "New customer: <appearance> is buying a pair of shoes, the shoes should be which "
        "color?\n"
        "Answer:";

    t.relevance.instruction =
        "You are a shoe salesman and want to recommend shoes to customers.\n"
        "From past experiences, you learned a pattern.\n"
        "Decide whether the pattern below is relevant for recommending a shoe color to the "
        "new customer.\n"
        "The answer should be one word (yes or no).\n"
        "Give your final answer in the format of \"Final answer: [answer].\"";
    t.relevance.user =
        "Our learned pattern: <hypothesis_high_reward>\n"
        "New customer: <appearance> is buying a pair of shoes.\n"
        "Is the pattern relevant to this customer?\n"
        "Answer:";
    return t;
}

TaskDescriptor make_deceptive_reviews() {
    TaskDescriptor t;
    t.name = "deceptive_reviews";
    t.payload_kind = PayloadKind::SingleText;
    t.labels = {"truthful", "deceptive"};
    t.label_patterns = {{"\\btruthful\\b", "truthful"}, {"\\bdeceptive\\b", "deceptive"}};

    t.generation.instruction =
        "You're a professional hotel review analyst.\n"
        "Given a set of hotel reviews, we want to generate hypotheses that are useful for "
        "predicting whether a review is truthful or deceptive. In other words, we want to "
        "know whether the review is written by someone who actually lived in the hotel.\n"
        "Using the given examples, please propose <num_hypotheses> possible hypotheses.\n"
        "These hypotheses should identify specific patterns that occur across the provided "
        "reviews.\n" +
        std::string(kNumberedListFormat) +
        "The hypotheses should analyze what kind of reviews are likely to be truthful or "
        "deceptive.";
    t.generation.user =
        "We have seen some hotel reviews:\n"
        "<observations>\n"
        "Please generate hypotheses that are useful for predicting whether a review is "
        "truthful or deceptive.\n"
        "Propose <num_hypotheses> possible hypotheses. " +
        std::string(kNumberedListFormat) + "Proposed hypotheses:";

    t.inference.instruction =
        "You are a professional deceptive detection agent and your job is to determine "
        "whether a hotel review is truthful or deceptive.\n"
        "In other words, we want to know whether the review is written by someone who had "
        "real experiences with the hotel.\n"
        "From past experiences, you learned a pattern.\n"
        "You need to determine whether each of the patterns holds for the current hotel "
        "review, and also predict whether the current hotel review is truthful or "
        "deceptive.\n"
        "Give an answer. The answer should be one word (truthful or deceptive).\n"
        "Give your final answer in the format of {Final answer: answer}";
    t.inference.user =
        "Our learned pattern: <hypothesis_high_reward>\n"
        "A hotel review is the following: <review>\n"
        "Given the pattern you learned above, give an answer of whether the hotel review "
        "above is deceptive or truthful.\n"
        "Think step by step.\n"
        "First step: Think about which pattern can be applied to the hotel review.\n"
        "Second step: Based on the pattern, is this hotel review deceptive or truthful?";

    t.zero_shot.instruction =
        "You are a deceptive detection agent and want to determine whether a hotel review "
        "is truthful or deceptive.\n"
        "In other words, we want to know whether the review is written by someone who "
        "actually lived in the hotel.\n"
        "Give an answer. The answer should be one word (truthful or deceptive).\n"
        "Give your final answer in the format of {Final answer: answer}";
    t.zero_shot.user =
        "A hotel review is the following: <review>\n"
        "Is this hotel review truthful or deceptive?\n"
        "Answer:";

    t.few_shot = t.zero_shot;
    t.few_shot.user =
        "We have seen some hotel reviews:\n"
        "<demonstrations>\n" +
        t.zero_shot.user;

    t.adaptive.instruction =
        "You are a professional hotel review analyst and you are able to determine whether "
        "a hotel review is deceptive or truthful.\n"
        "From past experiences, you learned some patterns.\n"
        "For each pattern, you will also see a couple of examples that worked for each "
        "pattern.\n"
        "First step: take a careful look at the examples associated with each pattern, and "
        "see which set of examples the current hotel review is most similar with. Choose "
        "and repeat the pattern corresponding to that examples set.\n"
        "Next, apply the pattern on the new sample to determine whether the new hotel "
        "review is deceptive or truthful.\n"
        "Finally, give an answer. The answer should be one word (deceptive or truthful).\n"
        "Please give your final answer in the following format:\n"
        "Reasoning for choosing pattern: reason,\n"
        "Chosen pattern: pattern,\n"
        "Reasoning for choice of prediction: reason,\n"
        "Final Answer: answer";
    t.adaptive.user =
        "Here are some previously generated patterns with some example where it predicted "
        "correctly if a hotel review is deceptive or truthful.\n"
        "<adaptive_info_prompt>\n"
        "A hotel review is the following: <review>\n"
        "Is this hotel review truthful or deceptive?\n"
        "Step 1: Look at the new hotel review and compare it with the set of examples "
        "associated with each provided pattern.\n"
        "Step 2: Find the set of examples that is the most similar to the new hotel review, "
        "pick and repeat the pattern associated with that set of examples.\n"
        "Step 3: Apply the pattern you picked to the new hotel review and predict whether "
        "the new hotel review is deceptive or truthful.\n"
        "Step 4: Give your final answer.\n"
        "Answer:";

    t.relevance.instruction =
        "You are a professional deceptive detection agent.\n"
        "From past experiences, you learned a pattern.\n"
        "Decide whether the pattern below is relevant to the hotel review.\n"
        "The answer should be one word (yes or no).\n"
        "Give your final answer in the format of {Final answer: answer}";
    t.relevance.user =
        "Our learned pattern: <hypothesis_high_reward>\n"
        "A hotel review is the following: <review>\n"
        "Is the pattern relevant to this review?\n"
        "Answer:";
    return t;
}

TaskDescriptor make_headline_popularity() {
    TaskDescriptor t;
    t.name = "headline_popularity";
    t.payload_kind = PayloadKind::PairedText;
    t.labels = {"headline_1", "headline_2"};
    t.label_patterns = {{"headline\\s*_?\\s*1", "headline_1"},
                        {"headline\\s*_?\\s*2", "headline_2"}};

    t.generation.instruction =
        "You are a professional writer for an online newspaper company.\n"
        "Given a pair of headlines created for the same article, you are asked to determine "
        "which will get more clicks. It is likely that the pair of headlines shares "
        "similarities, so please focus on their differences.\n"
        "What difference in two headlines leads to more clicks on one than the other?\n"
        "Based on the observations, please generate hypotheses that are useful for "
        "explaining why one headline out of the pair gets more clicked than the other.\n"
        "These hypotheses should identify patterns, phrases, wordings etc. that occur "
        "across the provided examples. They should also be generalizable to new "
        "instances.\n"
        "Please propose <num_hypotheses> possible hypotheses and generate them in the "
        "format of 1. [hypothesis], 2. [hypothesis], ... <num_hypotheses>. [hypothesis].";
    t.generation.user =
        "Here are the observations:\n"
        "<observations>\n"
        "Please generate hypotheses that can help determine which headlines have more "
        "clicks.\n"
        "Please propose <num_hypotheses> possible hypotheses.\n" +
        std::string(kNumberedListFormat) + "Proposed hypotheses:";

    t.inference.instruction =
        "You are a professional writer for an online newspaper company.\n"
        "Given a pair of headlines created for the same article, you are asked to determine "
        "which will get more clicks. It is likely that the pair of headlines shares "
        "similarities, so please focus on their differences.\n"
        "From past experiences, you learned some patterns.\n"
        "Now, at each time, you should apply the learned pattern to a new pair of headlines "
        "that are created for a new article and determine which headline gets clicked "
        "more.\n"
        "The answer for the higher clicks should be in the form \"Headline _\" where _ is "
        "either 1 or 2.\n"
        "Please give your final answer in the format of {Final Answer: Headline _.}";
    t.inference.user =
        "Learned pattern: <hypothesis_high_reward>\n"
        "Given the pattern you learned above, predict which of the following headlines will "
        "get more clicks:\n"
        "Headline 1: <headline_1>\n"
        "Headline 2: <headline_2>\n"
        "Think step by step.\n"
        "Step 1: Think about whether the pattern can be applied to the headlines.\n"
        "Step 2: Analyze the difference between \"Headline 1\" and \"Headline 2\".\n"
        "Step 3: Based on the pattern, which headline is likely to get more clicks?";

    t.zero_shot.instruction =
        "You are a writer for an online newspaper company. So you are excellent at "
        "determining which headlines are more likely to cause users to click on the "
        "article.\n"
        "You will be given two headlines, and determine which headline was clicked more "
        "often.\n"
        "You are only to give your answer.\n"
        "The answer for the higher clicks should be of the form \"Headline _\" where _ is "
        "either 1 or 2.\n"
        "Give your final answer in the following format:\n"
        "\"Answer: Headline _\"";
    t.zero_shot.user =
        "Which of the following headlines has more clicks:\n"
        "Headline 1: <headline_1>\n"
        "Headline 2: <headline_2>";

    t.few_shot = t.zero_shot;
    t.few_shot.user =
        "Here are some previous examples to help you:\n"
        "<demonstrations>\n" +
        t.zero_shot.user;

    t.adaptive.instruction =
        "You are a professional writer for an online newspaper company.\n"
        "You are excellent at determining which headlines are more likely to be clicked by "
        "users.\n"
        "From past experiences, you learned some patterns.\n"
        "For each pattern, you will also see a couple of examples that worked for each "
        "pattern.\n"
        "Please choose a pattern. To do this, look at the examples associated with each "
        "pattern, and find which set of the examples are closest to the given pair of "
        "headlines.\n"
        "Please choose the pattern corresponding to that set of examples.\n"
        "The answer for the higher clicks should be of the form \"Headline _\" where _ is "
        "either 1 or 2.\n"
        "Please give your final answer in the following format:\n"
        "Reasoning for choosing pattern: reason,\n"
        "Chosen pattern: pattern,\n"
        "Reasoning for choice of prediction: reason,\n"
        "Final Answer: answer";
    t.adaptive.user =
        "Here are some previously generated patterns with some examples where it predicted "
        "which one of the pair of headlines got more clicks.\n"
        "<adaptive_info_prompt>\n"
        "Which one out of the following pair of headlines will get more clicks?\n"
        "Headline 1: <headline_1>\n"
        "Headline 2: <headline_2>\n"
        "Think step by step.\n"
        "Step 1: Look at the new pair of headlines and compare them with the examples "
        "associated with each pattern.\n"
        "Step 2: Find the set of examples that is closest to the given pair of headlines, "
        "and pick the pattern associated with that set of examples.\n"
        "Step 3: Apply the picked pattern to the new pair of headlines. Based on that "
        "pattern, think about which one out of the pair of headlines will get more "
        "clicks.\n"
        "Step 4: Give your final answer.";

    t.relevance.instruction =
        "You are a professional writer for an online newspaper company.\n"
        "From past experiences, you learned a pattern.\n"
        "Decide whether the pattern below is relevant to the pair of headlines.\n"
        "The answer should be one word (yes or no).\n"
        "Give your final answer in the format of {Final answer: answer}";
    t.relevance.user =
        "Learned pattern: <hypothesis_high_reward>\n"
        "Headline 1: <headline_1>\n"
        "Headline 2: <headline_2>\n"
        "Is the pattern relevant to this pair of headlines?\n"
        "Answer:";
    return t;
}

TaskDescriptor make_tweet_popularity() {
    TaskDescriptor t;
    t.name = "tweet_popularity";
    t.payload_kind = PayloadKind::PairedText;
    t.labels = {"first_tweet", "second_tweet"};
    t.label_patterns = {{"\\bfirst(_tweet)?\\b", "first_tweet"},
                        {"\\bsecond(_tweet)?\\b", "second_tweet"}};

    t.generation.instruction =
        "You are a social media expert. You are an expert at determining which tweet will "
        "be retweeted more.\n"
        "Given a set of observations, you want to generate hypotheses that will help "
        "predict which tweet out of a pair of tweets is more likely to be retweeted.\n"
        "Please note that the paired tweets are about the same content and are posted by "
        "the same user, so you should focus on the wording difference between the two "
        "tweets in each pair.\n"
        "Please propose <num_hypotheses> possible hypotheses.\n" +
        std::string(kNumberedListFormat) +
        "Please make the hypotheses general enough to be applicable to new observations.";
    t.generation.user =
        "We made some observations:\n"
        "<observations>\n"
        "Generate hypotheses that are useful for predicting which tweet out of a pair of "
        "tweets is more likely to be retweeted.\n"
        "Please propose <num_hypotheses> possible hypotheses.\n" +
        std::string(kNumberedListFormat) + "Proposed hypotheses:";

    t.inference.instruction =
        "You are a social media expert.\n"
        "Given a pair of tweets, you are asked to predict which tweet will be retweeted "
        "more.\n"
        "Please note that the paired tweets are about the same content and are posted by "
        "the same user, so you should focus on the wording difference between the two "
        "tweets.\n"
        "From past experiences, you learned a pattern.\n"
        "Now, at each time, you should apply a learned pattern to a pair of tweets and "
        "determine which one will get more retweets.\n"
        "The answer for the higher retweets should be of the form \"the _ tweet\" where _ "
        "is either first or second.\n"
        "Please give your final answer in the format of {Final answer: the _ tweet}";
    t.inference.user =
        "Our learned pattern: <hypothesis_high_reward>\n"
        "The first tweet: <first_tweet>\n"
        "The second tweet: <second_tweet>\n"
        "Given the pattern you learned above, predict which one of the two tweets will get "
        "more retweets.\n"
        "Think step by step.\n"
        "First step: Think about if the pattern can be applied to the tweets.\n"
        "Second step: Analyze the textual difference between the two tweets.\n"
        "Third step: Based on the pattern, which tweet is more likely to get more "
        "retweets?\n"
        "Final step: Give your final answer in the format of {Final answer: the _ tweet}\n"
        "Final answer:";

    t.zero_shot.instruction =
        "You are a social media expert.\n"
        "Given a pair of tweets, you are asked to predict which tweet will be retweeted "
        "more.\n"
        "Please note that the paired tweets are about the same content and are posted by "
        "the same user, so you should focus on the wording difference between the two "
        "tweets.\n"
        "The answer for the higher retweets should be of the form \"the _ tweet\" where _ "
        "is either first or second.\n"
        "Please give your final answer in the format of {Final answer: the _ tweet}";
    t.zero_shot.user =
        "The first tweet: <first_tweet>\n"
        "The second tweet: <second_tweet>\n"
        "Which one of the two tweets will get more retweets?";

    t.few_shot = t.zero_shot;
    t.few_shot.user =
        "Here are some examples:\n"
        "<demonstrations>\n" +
        t.zero_shot.user;

    t.adaptive.instruction =
        "You are a social media expert.\n"
        "Given a pair of tweets, you are asked to predict which tweet will be retweeted "
        "more.\n"
        "From past experiences, you learned some patterns.\n"
        "You should apply a learned pattern to a pair of tweets and determine which one "
        "will get more retweets.\n"
        "For each pattern, you will also see a couple of examples that worked for each "
        "pattern.\n"
        "Please choose a pattern. To do this, look at the examples associated with each "
        "pattern, and find which set of the examples are closest to the given pair of "
        "tweets.\n"
        "Please choose the pattern corresponding to that set of examples.\n"
        "Please give your final answer in the following format:\n"
        "Reasoning for choosing pattern: reason,\n"
        "Chosen pattern: pattern,\n"
        "Reasoning for choice of prediction: reason,\n"
        "Final Answer: answer";
    t.adaptive.user =
        "Here are some previously generated patterns with some examples where it predicted "
        "which tweet will be retweeted more.\n"
        "<adaptive_info_prompt>\n"
        "The first tweet: <first_tweet>\n"
        "The second tweet: <second_tweet>\n"
        "Which one of the two tweets will get more retweets?\n"
        "Think step by step.\n"
        "Step 1: Look at the new pair of tweets and compare them with the examples "
        "associated with each pattern.\n"
        "Step 2: Find the set of examples that is closest to the given pair of tweets, and "
        "pick the pattern associated with that set of examples.\n"
        "Step 3: Analyze the textual difference between the two tweets.\n"
        "Step 4: Apply the picked pattern to the new pair of tweets. Based on that pattern, "
        "think about which one out of the pair of tweets will get more retweets.\n"
        "Step 5: Give your final answer.";

    t.relevance.instruction =
        "You are a social media expert.\n"
        "From past experiences, you learned a pattern.\n"
        "Decide whether the pattern below is relevant to the pair of tweets.\n"
        "The answer should be one word (yes or no).\n"
        "Please give your final answer in the format of {Final answer: answer}";
    t.relevance.user =
        "Our learned pattern: <hypothesis_high_reward>\n"
        "The first tweet: <first_tweet>\n"
        "The second tweet: <second_tweet>\n"
        "Is the pattern relevant to this pair of tweets?\n"
        "Answer:";
    return t;
}

}  // namespace

const TaskDescriptor& builtin(const std::string& name) {
    static const std::map<std::string, TaskDescriptor> registry = [] {
        std::map<std::string, TaskDescriptor> m;
        for (auto t : {make_shoe_sales(), make_deceptive_reviews(), make_headline_popularity(),
                       make_tweet_popularity()})
            m.emplace(t.name, std::move(t));
        return m;
    }();
    const auto it = registry.find(name);
    if (it == registry.end()) throw DomainError("unknown task: " + name);
    return it->second;
}

std::vector<std::string> builtin_names() {
    return {"shoe_sales", "deceptive_reviews", "headline_popularity", "tweet_popularity"};
}

}  // namespace hypgen::tasks
