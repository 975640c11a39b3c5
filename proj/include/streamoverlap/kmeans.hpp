#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "streamoverlap/text.hpp"

namespace streamoverlap {

struct KMeansResult {
  std::vector<std::size_t> assignment;   // cluster index per input vector
  std::vector<TermVector> centroids;     // unit norm, or empty for an all-zero cluster
  std::vector<double> distortion;        // sum of (1 - cosine) after each iteration
  std::size_t iterations = 0;
  bool converged = false;
};

/// Lloyd iterations under cosine distance (1 - cosine).
///
/// Initial centroids are k distinct inputs drawn uniformly with `seed`.
/// Each centroid is the normalized sum of its members' unit vectors, which
/// minimizes the within-cluster distance, so distortion never increases.
/// Assignment ties go to the lower cluster index. A cluster left empty takes
/// the vector farthest from its own centroid (among clusters with more than
/// one member). Stops when assignments repeat or after max_iters.
KMeansResult kmeans(std::span<const TermVector> vectors, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 100);

}  // namespace streamoverlap
