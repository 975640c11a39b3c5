#include "streamoverlap/tracking.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "streamoverlap/error.hpp"

namespace streamoverlap {

void CentroidAccumulator::add(const TermVector& member) {
  for (const auto& e : member.entries()) sum_[e.term] += e.weight;
  ++count_;
}

TermVector CentroidAccumulator::centroid(std::size_t k_centroid) const {
  if (count_ == 0) return {};
  const double inv = 1.0 / static_cast<double>(count_);
  std::vector<TermWeight> mean;
  mean.reserve(sum_.size());
  for (const auto& [term, w] : sum_) mean.push_back({term, w * inv});
  return TermVector(std::move(mean)).truncated(k_centroid).normalized();
}

TermVector centroid_of(std::span<const TermVector> members, std::size_t k_centroid) {
  CentroidAccumulator acc;
  for (const auto& m : members) acc.add(m);
  return acc.centroid(k_centroid);
}

std::vector<TopicCluster> init_clusters(std::span<const TopicSeed> seeds, std::size_t k_centroid) {
  std::vector<TopicCluster> clusters;
  clusters.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    TopicCluster c;
    c.topic_id = static_cast<std::uint32_t>(i);
    c.centroid = seeds[i].seed_vector.truncated(k_centroid).normalized();
    c.member_ids.push_back(seeds[i].doc_id);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

std::optional<std::uint32_t> assign(const TermVector& doc_vector, std::span<const TopicCluster> clusters,
                                    double theta_track) {
  std::optional<std::uint32_t> best;
  double best_score = -1.0;
  for (const auto& c : clusters) {
    const double s = cosine(doc_vector, c.centroid);
    if (s > best_score || (s == best_score && best && c.topic_id < *best)) {
      best_score = s;
      best = c.topic_id;
    }
  }
  if (best && best_score >= theta_track) return best;
  return std::nullopt;
}

void update_centroid(TopicCluster& cluster, std::span<const TermVector> member_vectors, std::size_t k_centroid) {
  cluster.centroid = centroid_of(member_vectors, k_centroid);
}

namespace {

// Inverted index from term to clusters whose centroid has carried it.
// Stale postings are harmless: their centroid weight reads as 0.
class CentroidIndex {
 public:
  explicit CentroidIndex(std::size_t clusters) : posted_(clusters), score_(clusters, 0.0), stamp_(clusters, kNone) {}

  void post(std::size_t cluster, const TermVector& centroid) {
    for (const auto& e : centroid.entries()) {
      if (posted_[cluster].insert(e.term).second) postings_[e.term].push_back(cluster);
    }
  }

  // Best cluster by cosine, ties to the lowest index.
  std::optional<std::pair<std::size_t, double>> best(const TermVector& doc, std::span<const TopicCluster> clusters,
                                                     std::size_t round) {
    touched_.clear();
    for (const auto& e : doc.entries()) {
      const auto it = postings_.find(e.term);
      if (it == postings_.end()) continue;
      for (const std::size_t c : it->second) {
        const double w = clusters[c].centroid.weight(e.term);
        if (w == 0.0) continue;
        if (stamp_[c] != round) {
          stamp_[c] = round;
          score_[c] = 0.0;
          touched_.push_back(c);
        }
        score_[c] += e.weight * w;
      }
    }
    std::optional<std::pair<std::size_t, double>> out;
    for (const std::size_t c : touched_) {
      const double s = score_[c] / (doc.norm() * clusters[c].centroid.norm());
      if (!out || s > out->second || (s == out->second && c < out->first)) out = {c, s};
    }
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::unordered_map<TermId, std::vector<std::size_t>> postings_;
  std::vector<std::unordered_set<TermId>> posted_;
  std::vector<double> score_;
  std::vector<std::size_t> stamp_;
  std::vector<std::size_t> touched_;
};

}  // namespace

StreamProfile track(std::string_view stream_id, std::span<const WeightedDocument> stream,
                    std::span<const TopicSeed> seeds, const TrackingParams& params) {
  if (params.k_centroid == 0) throw ValidationError("k_centroid must be >= 1");
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].timestamp < stream[i - 1].timestamp) {
      throw OrderingError("track: document " + stream[i].id + " is earlier than its predecessor");
    }
  }

  // Seed position -> cluster index. Positions are checked against ids so
  // that seeds from a different stream are rejected.
  std::unordered_map<std::size_t, std::size_t> seed_at;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const auto pos = seeds[s].position;
    if (pos >= stream.size() || stream[pos].id != seeds[s].doc_id) {
      throw ValidationError("track: seed " + seeds[s].doc_id + " does not match the stream");
    }
    if (!seed_at.emplace(pos, s).second) throw ValidationError("track: duplicate seed " + seeds[s].doc_id);
  }

  auto clusters = init_clusters(seeds, params.k_centroid);
  std::vector<CentroidAccumulator> sums(clusters.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) sums[s].add(seeds[s].seed_vector);

  CentroidIndex index(clusters.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (const auto it = seed_at.find(i); it != seed_at.end()) {
      index.post(it->second, clusters[it->second].centroid);
      continue;
    }
    const auto& doc = stream[i];
    if (doc.vector.empty()) continue;
    const auto hit = index.best(doc.vector, clusters, i);
    if (!hit || hit->second < params.theta_track) continue;
    auto& cluster = clusters[hit->first];
    cluster.member_ids.push_back(doc.id);
    sums[hit->first].add(doc.vector);
    cluster.centroid = sums[hit->first].centroid(params.k_centroid);
    index.post(hit->first, cluster.centroid);
  }

  StreamProfile profile;
  profile.stream_id = std::string(stream_id);
  profile.clusters_before_pruning = clusters.size();
  profile.clusters = prune_singletons(std::move(clusters));
  profile.params = {{"theta_track", fmt::format("{}", params.theta_track)},
                    {"k_centroid", std::to_string(params.k_centroid)}};
  return profile;
}

std::vector<TopicCluster> prune_singletons(std::vector<TopicCluster> clusters) {
  std::erase_if(clusters, [](const TopicCluster& c) { return c.member_count() == 1; });
  return clusters;
}

}  // namespace streamoverlap
