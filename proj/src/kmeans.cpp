#include "streamoverlap/kmeans.hpp"

#include <optional>
#include <stdexcept>

#include "streamoverlap/error.hpp"
#include "streamoverlap/rng.hpp"

namespace streamoverlap {

namespace {

TermVector spherical_mean(std::span<const TermVector> units, const std::vector<std::size_t>& assignment,
                          std::size_t cluster) {
  std::vector<TermWeight> sum;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (assignment[i] != cluster) continue;
    const auto e = units[i].entries();
    sum.insert(sum.end(), e.begin(), e.end());
  }
  return TermVector(std::move(sum)).normalized();
}

double distortion(std::span<const TermVector> units, const std::vector<std::size_t>& assignment,
                  const std::vector<TermVector>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) total += 1.0 - cosine(units[i], centroids[assignment[i]]);
  return total;
}

}  // namespace

KMeansResult kmeans(std::span<const TermVector> vectors, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
  if (k == 0) throw ValidationError("kmeans: K must be >= 1");
  if (max_iters == 0) throw ValidationError("kmeans: max_iters must be >= 1");
  if (k > vectors.size()) {
    throw ValidationError("kmeans: K=" + std::to_string(k) + " exceeds the " + std::to_string(vectors.size()) +
                          " input vectors");
  }
  std::vector<TermVector> units;
  units.reserve(vectors.size());
  for (const auto& v : vectors) units.push_back(v.normalized());

  KMeansResult result;
  Rng rng(seed);
  for (const auto i : sample_without_replacement(units.size(), k, rng)) result.centroids.push_back(units[i]);

  const std::size_t n = units.size();
  std::vector<std::size_t> previous;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::vector<std::size_t> assignment(n, 0);
    std::vector<double> best(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double top = cosine(units[i], result.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double s = cosine(units[i], result.centroids[c]);
        if (s > top) {
          top = s;
          assignment[i] = c;
        }
      }
      best[i] = top;
    }

    std::vector<std::size_t> sizes(k, 0);
    for (const auto a : assignment) ++sizes[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::optional<std::size_t> far;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assignment[i]] < 2) continue;
        if (!far || best[i] < best[*far]) far = i;
      }
      if (!far) break;  // cannot happen while k <= n
      --sizes[assignment[*far]];
      assignment[*far] = c;
      best[*far] = 1.0;
      sizes[c] = 1;
    }

    if (assignment == previous) {
      result.converged = true;
      break;
    }
    for (std::size_t c = 0; c < k; ++c) result.centroids[c] = spherical_mean(units, assignment, c);
    result.distortion.push_back(distortion(units, assignment, result.centroids));
    result.iterations = iter + 1;
    previous = std::move(assignment);
  }
  result.assignment = std::move(previous);
  return result;
}

}  // namespace streamoverlap
