#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamoverlap/alignment.hpp"
#include "streamoverlap/document.hpp"
#include "streamoverlap/text.hpp"

namespace streamoverlap {

/// Multinomial unigram language model per category with add-one smoothing
/// over the training vocabulary, plus a document prior.
///
/// Terms outside the training vocabulary carry no evidence and are skipped
/// when scoring. `feature_hook`, when set, adds an extra per-category
/// log-score term computed from the topic's member terms.
class CategoryModel {
 public:
  using FeatureHook = std::function<double(Category, std::span<const std::string> terms)>;

  std::span<const Category> categories() const noexcept { return categories_; }
  bool has(Category c) const;
  std::size_t vocabulary_size() const noexcept { return counts_.size(); }

  double log_prior(Category c) const;
  // ln((count(c, term) + 1) / (tokens(c) + |V|)); nullopt for unseen terms.
  std::optional<double> log_likelihood(Category c, const std::string& term) const;

  // Log posterior (up to a shared constant) for every model category.
  std::vector<double> log_scores(std::span<const std::string> terms) const;

  FeatureHook feature_hook;

 private:
  friend CategoryModel train_categories(std::span<const Document>, const TextPrep&, std::span<const Category>);

  std::size_t slot(Category c) const;

  std::vector<Category> categories_;
  std::vector<std::uint64_t> docs_;
  std::vector<std::uint64_t> tokens_;
  std::uint64_t total_docs_ = 0;
  std::unordered_map<std::string, std::vector<std::uint32_t>> counts_;
};

// Trains on every document carrying a category label. Each category in
// `required` must have at least one training document, otherwise a
// ValidationError names it. Labels outside `required` are ignored.
CategoryModel train_categories(std::span<const Document> labeled, const TextPrep& prep,
                               std::span<const Category> required = kAllCategories);

struct TopicClassification {
  std::uint32_t topic_id = 0;
  Category category = Category::celebrity;
  double score = 0.0;  // margin of best over second-best log posterior
};

TopicClassification classify_topic(const CategoryModel& model, const TopicCluster& cluster,
                                   std::span<const std::string> member_texts, const TextPrep& prep);

struct RankedTopics {
  std::vector<TopicClassification> topics;
  bool short_supply = false;  // fewer than n topics carried the category
};

// The n topics of `category` with the largest margin; ties by topic id.
RankedTopics top_ranked(std::span<const TopicClassification> classified, Category category, std::size_t n);

// Per category, the summed member counts of destination clusters reached by
// edges from that category's topics. Every category is present in the map.
std::map<Category, std::uint64_t> intensity(std::span<const TopicClassification> tm_topics,
                                            std::span<const AlignmentEdge> edges, const StreamProfile& sm_profile);

}  // namespace streamoverlap
