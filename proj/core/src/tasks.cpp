#include "hypgen/tasks.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hypgen/util.hpp"

namespace hypgen::tasks {

namespace {

const std::vector<std::string> kShoeColors = {"white", "red",  "orange",
                                              "green", "blue", "black"};
const std::vector<std::string> kHeights = {"short", "average", "tall"};
const std::vector<std::string> kGenders = {"male", "female"};
const std::vector<std::string> kBagSizes = {"small", "medium", "large"};

std::string field(const Example& e, const std::string& name) {
    const auto& rec = std::get<FeatureRecord>(e.payload);
    const auto it = rec.fields.find(name);
    if (it == rec.fields.end()) throw DomainError("missing feature field: " + name);
    return it->second;
}

std::string appearance_text(const Example& e) {
    std::ostringstream os;
    os << "a customer with age " << field(e, "age") << ", height " << field(e, "height")
       << ", gender " << field(e, "gender") << ", hat color " << field(e, "hat_color")
       << ", shirt color " << field(e, "shirt_color") << ", bag color "
       << field(e, "bag_color") << ", bag size " << field(e, "bag_size");
    return os.str();
}

}  // namespace

std::string label_display(const TaskDescriptor& task, const std::string& label) {
    if (task.name == "headline_popularity")
        return label == "headline_1" ? "Headline 1" : "Headline 2";
    if (task.name == "tweet_popularity")
        return label == "first_tweet" ? "the first tweet" : "the second tweet";
    return label;
}

Bindings payload_bindings(const TaskDescriptor& task, const Example& example) {
    switch (task.payload_kind) {
        case PayloadKind::FeatureRecord:
            return {{"appearance", appearance_text(example)}};
        case PayloadKind::SingleText:
            return {{"review", std::get<SingleText>(example.payload).text}};
        case PayloadKind::PairedText: {
            const auto& p = std::get<PairedText>(example.payload);
            if (task.name == "tweet_popularity")
                return {{"first_tweet", p.first}, {"second_tweet", p.second}};
            return {{"headline_1", p.first}, {"headline_2", p.second}};
        }
    }
    throw DomainError("unhandled payload kind");
}

std::string observation_text(const TaskDescriptor& task, const Example& example,
                             bool with_label) {
    std::ostringstream os;
    switch (task.payload_kind) {
        case PayloadKind::FeatureRecord:
            os << "New customer: " << appearance_text(example);
            if (with_label) os << ". The customer bought " << example.label << " shoes.";
            break;
        case PayloadKind::SingleText:
            os << "Review: " << std::get<SingleText>(example.payload).text;
            if (with_label) os << "\nObservation: this review is " << example.label << ".";
            break;
        case PayloadKind::PairedText: {
            const auto& p = std::get<PairedText>(example.payload);
            if (task.name == "tweet_popularity") {
                os << "The first tweet: " << p.first << "\nThe second tweet: " << p.second;
                if (with_label)
                    os << "\nObservation: " << label_display(task, example.label)
                       << " got more retweets.";
            } else {
                os << "Headline 1: " << p.first << "\nHeadline 2: " << p.second;
                if (with_label)
                    os << "\nObservation: " << label_display(task, example.label)
                       << " got more clicks.";
            }
            break;
        }
    }
    return os.str();
}

std::vector<Example> generate_shoe_sales(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("generate_shoe_sales: n must be >= 1");
    Rng rng(seed);
    std::vector<Example> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        FeatureRecord rec;
        rec.fields["age"] = std::to_string(18 + rng.bounded(53));  // [18, 70]
        rec.fields["height"] = kHeights[rng.bounded(kHeights.size())];
        rec.fields["gender"] = kGenders[rng.bounded(kGenders.size())];
        rec.fields["hat_color"] = kShoeColors[rng.bounded(kShoeColors.size())];
        rec.fields["shirt_color"] = kShoeColors[rng.bounded(kShoeColors.size())];
        rec.fields["bag_color"] = kShoeColors[rng.bounded(kShoeColors.size())];
        rec.fields["bag_size"] = kBagSizes[rng.bounded(kBagSizes.size())];
        const std::string label = rec.fields["shirt_color"];
        out.push_back(Example{"shoe-" + std::to_string(i), Payload{rec}, label});
    }
    return out;
}

std::vector<Example> load_dataset(const std::filesystem::path& path,
                                  const TaskDescriptor& task) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open dataset: " + path.string());

    static const std::set<std::string> kShoeFields = {
        "age", "height", "gender", "hat_color", "shirt_color", "bag_color", "bag_size"};

    std::vector<Example> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        Example e;
        try {
            e = nlohmann::json::parse(line).get<Example>();
        } catch (const std::exception& ex) {
            throw DomainError(where + ": malformed example: " + ex.what());
        }
        if (!task.has_label(e.label))
            throw DomainError(where + ": unknown label \"" + e.label + "\"");
        if (!ids.insert(e.id).second) throw DomainError(where + ": duplicate id " + e.id);

        const bool kind_ok =
            (task.payload_kind == PayloadKind::SingleText &&
             std::holds_alternative<SingleText>(e.payload)) ||
            (task.payload_kind == PayloadKind::PairedText &&
             std::holds_alternative<PairedText>(e.payload)) ||
            (task.payload_kind == PayloadKind::FeatureRecord &&
             std::holds_alternative<FeatureRecord>(e.payload));
        if (!kind_ok) throw DomainError(where + ": payload kind does not match task");

        if (task.name == "shoe_sales") {
            const auto& rec = std::get<FeatureRecord>(e.payload);
            for (const auto& f : kShoeFields)
                if (!rec.fields.count(f)) throw DomainError(where + ": missing field " + f);
            if (rec.fields.size() != kShoeFields.size())
                throw DomainError(where + ": unexpected extra feature fields");
        }
        out.push_back(std::move(e));
    }
    return out;
}

void save_dataset(const std::filesystem::path& path, const std::vector<Example>& examples) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write dataset: " + path.string());
    for (const auto& e : examples) out << nlohmann::json(e).dump() << "\n";
}

std::pair<std::vector<Example>, std::vector<Example>> sample_split(
    const std::vector<Example>& data, std::size_t n_train, std::size_t n_test,
    std::uint64_t seed) {
    if (data.size() < n_train + n_test)
        throw DomainError("sample_split: dataset smaller than n_train + n_test");
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);
    std::vector<Example> train, test;
    train.reserve(n_train);
    test.reserve(n_test);
    for (std::size_t i = 0; i < n_train; ++i) train.push_back(data[idx[i]]);
    for (std::size_t i = 0; i < n_test; ++i) test.push_back(data[idx[n_train + i]]);
    return {std::move(train), std::move(test)};
}

}  // namespace hypgen::tasks
