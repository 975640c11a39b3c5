#include "streamoverlap/categories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "streamoverlap/error.hpp"

namespace streamoverlap {

bool CategoryModel::has(Category c) const {
  return std::find(categories_.begin(), categories_.end(), c) != categories_.end();
}

std::size_t CategoryModel::slot(Category c) const {
  const auto it = std::find(categories_.begin(), categories_.end(), c);
  if (it == categories_.end()) throw std::out_of_range("category not in model: " + std::string(to_string(c)));
  return static_cast<std::size_t>(it - categories_.begin());
}

double CategoryModel::log_prior(Category c) const {
  const auto s = slot(c);
  return std::log(static_cast<double>(docs_[s]) / static_cast<double>(total_docs_));
}

std::optional<double> CategoryModel::log_likelihood(Category c, const std::string& term) const {
  const auto s = slot(c);
  const auto it = counts_.find(term);
  if (it == counts_.end()) return std::nullopt;
  return std::log((static_cast<double>(it->second[s]) + 1.0) /
                  static_cast<double>(tokens_[s] + counts_.size()));
}

std::vector<double> CategoryModel::log_scores(std::span<const std::string> terms) const {
  const auto n = categories_.size();
  std::vector<double> scores(n);
  std::vector<double> denom(n);
  for (std::size_t s = 0; s < n; ++s) {
    scores[s] = std::log(static_cast<double>(docs_[s]) / static_cast<double>(total_docs_));
    denom[s] = std::log(static_cast<double>(tokens_[s] + counts_.size()));
  }
  for (const auto& t : terms) {
    const auto it = counts_.find(t);
    if (it == counts_.end()) continue;
    for (std::size_t s = 0; s < n; ++s) scores[s] += std::log(static_cast<double>(it->second[s]) + 1.0) - denom[s];
  }
  if (feature_hook) {
    for (std::size_t s = 0; s < n; ++s) scores[s] += feature_hook(categories_[s], terms);
  }
  return scores;
}

CategoryModel train_categories(std::span<const Document> labeled, const TextPrep& prep,
                               std::span<const Category> required) {
  CategoryModel model;
  for (const Category c : kAllCategories) {
    if (std::find(required.begin(), required.end(), c) != required.end()) model.categories_.push_back(c);
  }
  if (model.categories_.empty()) throw ValidationError("train_categories: no categories requested");
  const auto n = model.categories_.size();
  model.docs_.assign(n, 0);
  model.tokens_.assign(n, 0);

  for (const auto& doc : labeled) {
    if (!doc.category || !model.has(*doc.category)) continue;
    const auto s = model.slot(*doc.category);
    ++model.docs_[s];
    ++model.total_docs_;
    for (auto& term : prep.terms(doc.text)) {
      auto [it, inserted] = model.counts_.try_emplace(std::move(term));
      if (inserted) it->second.assign(n, 0);
      ++it->second[s];
      ++model.tokens_[s];
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (model.docs_[s] == 0) {
      throw ValidationError("train_categories: no training documents for category " +
                            std::string(to_string(model.categories_[s])));
    }
  }
  return model;
}

TopicClassification classify_topic(const CategoryModel& model, const TopicCluster& cluster,
                                   std::span<const std::string> member_texts, const TextPrep& prep) {
  std::vector<std::string> terms;
  for (const auto& text : member_texts) {
    auto t = prep.terms(text);
    terms.insert(terms.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  const auto scores = model.log_scores(terms);
  std::size_t best = 0;
  for (std::size_t s = 1; s < scores.size(); ++s) {
    if (scores[s] > scores[best]) best = s;
  }
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < scores.size(); ++s) {
    if (s != best) second = std::max(second, scores[s]);
  }
  TopicClassification out;
  out.topic_id = cluster.topic_id;
  out.category = model.categories()[best];
  out.score = scores.size() > 1 ? scores[best] - second : 0.0;
  return out;
}

RankedTopics top_ranked(std::span<const TopicClassification> classified, Category category, std::size_t n) {
  if (n == 0) throw std::invalid_argument("top_ranked: n must be >= 1");
  RankedTopics out;
  for (const auto& t : classified) {
    if (t.category == category) out.topics.push_back(t);
  }
  std::sort(out.topics.begin(), out.topics.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.topic_id < b.topic_id;
  });
  if (out.topics.size() < n) {
    out.short_supply = true;
  } else {
    out.topics.resize(n);
  }
  return out;
}

std::map<Category, std::uint64_t> intensity(std::span<const TopicClassification> tm_topics,
                                            std::span<const AlignmentEdge> edges, const StreamProfile& sm_profile) {
  std::map<Category, std::uint64_t> totals;
  for (const Category c : kAllCategories) totals[c] = 0;

  std::unordered_map<std::uint32_t, Category> topic_category;
  for (const auto& t : tm_topics) topic_category.emplace(t.topic_id, t.category);
  std::unordered_map<std::uint32_t, std::uint64_t> sm_size;
  for (const auto& c : sm_profile.clusters) sm_size.emplace(c.topic_id, c.member_count());

  for (const auto& e : edges) {
    const auto cat = topic_category.find(e.src_topic);
    if (cat == topic_category.end()) continue;
    const auto size = sm_size.find(e.dst_topic);
    if (size == sm_size.end()) {
      throw ValidationError("intensity: edge targets unknown SM topic " + std::to_string(e.dst_topic));
    }
    totals[cat->second] += size->second;
  }
  return totals;
}

}  // namespace streamoverlap
