#include "streamoverlap/alignment.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "streamoverlap/error.hpp"
#include "streamoverlap/rng.hpp"

namespace streamoverlap {

std::vector<AlignmentEdge> align(const StreamProfile& src, const StreamProfile& dst, double theta_align) {
  std::vector<AlignmentEdge> edges;
  if (src.clusters.empty() || dst.clusters.empty()) return edges;

  // Exhaustive search through an inverted index: every destination cluster
  // sharing a term is scored, the rest have dot product 0. Products are
  // summed in ascending term order, as dot() does.
  std::unordered_map<TermId, std::vector<std::pair<std::size_t, double>>> postings;
  for (std::size_t d = 0; d < dst.clusters.size(); ++d) {
    for (const auto& e : dst.clusters[d].centroid.entries()) postings[e.term].emplace_back(d, e.weight);
  }

  std::vector<double> score(dst.clusters.size(), 0.0);
  std::vector<char> hit(dst.clusters.size(), 0);
  std::vector<std::size_t> touched;
  for (const auto& s : src.clusters) {
    touched.clear();
    for (const auto& e : s.centroid.entries()) {
      const auto it = postings.find(e.term);
      if (it == postings.end()) continue;
      for (const auto& [d, w] : it->second) {
        if (!hit[d]) {
          hit[d] = 1;
          score[d] = 0.0;
          touched.push_back(d);
        }
        score[d] += e.weight * w;
      }
    }
    std::optional<std::size_t> best;
    for (const std::size_t d : touched) {
      hit[d] = 0;
      if (!best || score[d] > score[*best] ||
          (score[d] == score[*best] && dst.clusters[d].topic_id < dst.clusters[*best].topic_id)) {
        best = d;
      }
    }
    if (best && score[*best] >= theta_align) {
      edges.push_back({s.topic_id, dst.clusters[*best].topic_id, score[*best]});
    }
  }
  return edges;
}

double overlap(const StreamProfile& src, std::span<const AlignmentEdge> edges) {
  if (src.clusters.empty()) return 0.0;
  return 100.0 * static_cast<double>(edges.size()) / static_cast<double>(src.clusters.size());
}

OverlapMatrix::OverlapMatrix(std::vector<std::string> stream_ids)
    : ids_(std::move(stream_ids)), cells_(ids_.size() * ids_.size()) {}

void OverlapMatrix::set(std::size_t from, std::size_t to, double percent) {
  if (from >= ids_.size() || to >= ids_.size() || from == to) throw std::out_of_range("OverlapMatrix::set");
  if (!(percent >= 0.0 && percent <= 100.0)) throw std::invalid_argument("overlap percentage outside [0, 100]");
  cells_[from * ids_.size() + to] = percent;
}

std::optional<double> OverlapMatrix::at(std::size_t from, std::size_t to) const {
  if (from >= ids_.size() || to >= ids_.size()) throw std::out_of_range("OverlapMatrix::at");
  return cells_[from * ids_.size() + to];
}

bool OverlapMatrix::complete() const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    for (std::size_t j = 0; j < ids_.size(); ++j) {
      if (i != j && !cells_[i * ids_.size() + j]) return false;
    }
  }
  return true;
}

OverlapMatrix overlap_matrix(std::span<const StreamProfile> profiles, double theta_align) {
  if (profiles.size() < 2) throw ValidationError("overlap matrix needs at least two profiles");
  std::vector<std::string> ids;
  for (const auto& p : profiles) ids.push_back(p.stream_id);
  OverlapMatrix m(std::move(ids));
  for (std::size_t a = 0; a < profiles.size(); ++a) {
    for (std::size_t b = 0; b < profiles.size(); ++b) {
      if (a == b) continue;
      const auto edges = align(profiles[a], profiles[b], theta_align);
      m.set(a, b, overlap(profiles[a], edges));
    }
  }
  return m;
}

std::vector<std::uint32_t> sample_unaligned(const StreamProfile& src, std::span<const AlignmentEdge> edges,
                                            std::size_t n, std::uint64_t seed) {
  std::unordered_set<std::uint32_t> aligned;
  for (const auto& e : edges) aligned.insert(e.src_topic);
  std::vector<std::uint32_t> pool;
  for (const auto& c : src.clusters) {
    if (!aligned.contains(c.topic_id)) pool.push_back(c.topic_id);
  }
  if (pool.size() <= n) return pool;
  Rng rng(seed);
  std::vector<std::uint32_t> out;
  out.reserve(n);
  for (const auto i : sample_without_replacement(pool.size(), n, rng)) out.push_back(pool[i]);
  return out;
}

}  // namespace streamoverlap
