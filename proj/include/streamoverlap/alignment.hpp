#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamoverlap/tracking.hpp"

namespace streamoverlap {

struct AlignmentEdge {
  std::uint32_t src_topic = 0;
  std::uint32_t dst_topic = 0;
  double similarity = 0.0;

  friend bool operator==(const AlignmentEdge&, const AlignmentEdge&) = default;
};

// Nearest destination cluster for every source cluster, by dot product of
// the unit centroids. An edge is kept when the best value reaches
// theta_align; ties go to the lowest destination topic id. Edges come out in
// source cluster order. Both profiles must share one term-id space.
std::vector<AlignmentEdge> align(const StreamProfile& src, const StreamProfile& dst, double theta_align);

// Percentage of source clusters with an edge; 0 for an empty source.
double overlap(const StreamProfile& src, std::span<const AlignmentEdge> edges);

// Directed overlap percentages for every ordered pair of distinct streams.
class OverlapMatrix {
 public:
  explicit OverlapMatrix(std::vector<std::string> stream_ids);

  const std::vector<std::string>& stream_ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }

  // Throws std::out_of_range for i == j or indices past the end, and
  // std::invalid_argument for values outside [0, 100].
  void set(std::size_t from, std::size_t to, double percent);
  std::optional<double> at(std::size_t from, std::size_t to) const;
  bool complete() const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::optional<double>> cells_;
};

// Requires at least two profiles.
OverlapMatrix overlap_matrix(std::span<const StreamProfile> profiles, double theta_align);

// Seeded uniform sample, without replacement, of source topic ids that have
// no edge. Returns every unaligned topic when fewer than n exist.
std::vector<std::uint32_t> sample_unaligned(const StreamProfile& src, std::span<const AlignmentEdge> edges,
                                            std::size_t n, std::uint64_t seed);

}  // namespace streamoverlap
