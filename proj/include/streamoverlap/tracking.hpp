#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "streamoverlap/detection.hpp"
#include "streamoverlap/text.hpp"

namespace streamoverlap {

struct TrackingParams {
  double theta_track = 0.6;
  std::size_t k_centroid = 100;
};

struct TopicCluster {
  std::uint32_t topic_id = 0;
  TermVector centroid;  // unit norm, at most k_centroid entries
  std::vector<std::string> member_ids;

  std::size_t member_count() const noexcept { return member_ids.size(); }
};

// Ordered key/value record of every knob that produced a profile.
using ParamRecord = std::vector<std::pair<std::string, std::string>>;

struct StreamProfile {
  std::string stream_id;
  std::vector<TopicCluster> clusters;
  ParamRecord params;
  std::size_t clusters_before_pruning = 0;
};

// Running sum of member vectors. centroid() is the member mean truncated
// to the highest-weighted terms and normalized to unit length.
class CentroidAccumulator {
 public:
  void add(const TermVector& member);
  std::size_t count() const noexcept { return count_; }
  TermVector centroid(std::size_t k_centroid) const;

 private:
  std::unordered_map<TermId, double> sum_;
  std::size_t count_ = 0;
};

TermVector centroid_of(std::span<const TermVector> members, std::size_t k_centroid);

// One cluster per seed, topic ids 0..n-1 in seed order.
std::vector<TopicCluster> init_clusters(std::span<const TopicSeed> seeds, std::size_t k_centroid);

// Cluster with the highest cosine to doc_vector if it reaches theta_track;
// ties go to the lowest topic id.
std::optional<std::uint32_t> assign(const TermVector& doc_vector, std::span<const TopicCluster> clusters,
                                    double theta_track);

// Recomputes the centroid from the full member vectors.
void update_centroid(TopicCluster& cluster, std::span<const TermVector> member_vectors, std::size_t k_centroid);

/// Online tracking over one time-ordered stream.
///
/// A seed's cluster becomes available once the stream reaches the seed's
/// document; earlier documents cannot join it. Each admission recomputes
/// that cluster's centroid. Singletons are pruned at the end.
StreamProfile track(std::string_view stream_id, std::span<const WeightedDocument> stream,
                    std::span<const TopicSeed> seeds, const TrackingParams& params);

std::vector<TopicCluster> prune_singletons(std::vector<TopicCluster> clusters);

}  // namespace streamoverlap
