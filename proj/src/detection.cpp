#include "streamoverlap/detection.hpp"

#include <algorithm>
#include <stdexcept>

#include "streamoverlap/error.hpp"

namespace streamoverlap {

namespace {

std::uint64_t fmix64(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

void for_each_combination(std::span<const TermId> ids, std::size_t k, std::vector<TermId>& scratch,
                          std::vector<std::uint64_t>& out, std::uint64_t mask) {
  const std::size_t n = ids.size();
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  scratch.resize(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) scratch[i] = ids[idx[i]];
    out.push_back(hash_term_tuple(scratch) & mask);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::uint64_t hash_term_tuple(std::span<const TermId> sorted_ids) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const TermId id : sorted_ids) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= (id >> shift) & 0xFFU;
      h *= 0x100000001b3ULL;
    }
  }
  return fmix64(h);
}

KTermTable::KTermTable(KTermParams params) : params_(params) {
  if (params_.k < 1) throw ValidationError("k-term size must be >= 1");
  if (params_.term_cap < params_.k) throw ValidationError("term cap must be >= k");
  if (params_.table_bits < 6 || params_.table_bits > 40) throw ValidationError("table bits must be in [6, 40]");
  bits_.assign(static_cast<std::size_t>(slots() / 64), 0);
}

double KTermTable::novelty_score_and_insert(std::span<const std::uint64_t> keys) {
  if (keys.empty()) return 0.0;
  std::size_t unseen = 0;
  for (const auto key : keys) {
    if (!test(key)) ++unseen;
  }
  for (const auto key : keys) {
    auto& word = bits_[key >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (key & 63);
    if (!(word & bit)) {
      word |= bit;
      ++set_count_;
    }
  }
  return static_cast<double>(unseen) / static_cast<double>(keys.size());
}

std::vector<std::uint64_t> kterm_keys(const TermVector& doc_vector, const KTermParams& params) {
  if (params.k < 1) throw ValidationError("k-term size must be >= 1");
  if (doc_vector.empty()) return {};
  const TermVector top = doc_vector.truncated(params.term_cap);
  std::vector<TermId> ids;
  ids.reserve(top.size());
  for (const auto& e : top.entries()) ids.push_back(e.term);  // ascending already

  const std::uint64_t mask = (std::uint64_t{1} << params.table_bits) - 1;
  std::vector<std::uint64_t> keys;
  std::vector<TermId> scratch;
  const std::size_t k = std::min<std::size_t>(params.k, ids.size());
  for_each_combination(ids, k, scratch, keys, mask);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

std::vector<TopicSeed> detect(std::span<const WeightedDocument> stream, KTermTable& table, double theta_new) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].timestamp < stream[i - 1].timestamp) {
      throw OrderingError("detect: document " + stream[i].id + " is earlier than its predecessor");
    }
  }
  std::vector<TopicSeed> seeds;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& doc = stream[i];
    const auto keys = kterm_keys(doc.vector, table.params());
    const double novelty = table.novelty_score_and_insert(keys);
    if (!keys.empty() && novelty >= theta_new) seeds.push_back({doc.id, i, novelty, doc.vector});
  }
  return seeds;
}

}  // namespace streamoverlap
