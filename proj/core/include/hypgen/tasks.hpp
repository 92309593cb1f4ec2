#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "hypgen/llm.hpp"
#include "hypgen/task.hpp"

namespace hypgen::tasks {

/// Built-in tasks: shoe_sales, deceptive_reviews, headline_popularity,
/// tweet_popularity. Throws DomainError for unknown names.
const TaskDescriptor& builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Renders an example as prompt text; with_label produces the observation
/// form used in generation and few-shot blocks.
std::string observation_text(const TaskDescriptor& task, const Example& example,
                             bool with_label);

/// Placeholder bindings for the example's payload fields (<appearance>,
/// <review>, <headline_1>/<headline_2>, <first_tweet>/<second_tweet>).
Bindings payload_bindings(const TaskDescriptor& task, const Example& example);

/// Human-readable phrasing of a label, used in observation text.
std::string label_display(const TaskDescriptor& task, const std::string& label);

/// Synthetic task: seven appearance features drawn uniformly; the label is
/// the shirt color, so shoes always match the shirt by construction.
std::vector<Example> generate_shoe_sales(std::size_t n, std::uint64_t seed);

/// JSON Lines, one Example per line. Malformed lines, unknown labels,
/// missing payload fields, and duplicate ids are rejected with line numbers.
std::vector<Example> load_dataset(const std::filesystem::path& path,
                                  const TaskDescriptor& task);

void save_dataset(const std::filesystem::path& path, const std::vector<Example>& examples);

/// Disjoint seeded train/test samples; train order is fixed by the seed
/// (training is order-sensitive).
std::pair<std::vector<Example>, std::vector<Example>> sample_split(
    const std::vector<Example>& data, std::size_t n_train, std::size_t n_test,
    std::uint64_t seed);

}  // namespace hypgen::tasks
