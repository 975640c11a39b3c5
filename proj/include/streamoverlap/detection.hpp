#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamoverlap/text.hpp"

namespace streamoverlap {

struct KTermParams {
  std::uint32_t k = 3;           // combination size
  std::uint32_t term_cap = 20;   // highest-weighted terms considered per document
  std::uint32_t table_bits = 27; // table holds 2^table_bits bits
};

// Name of the pinned key hash, written into every manifest.
inline constexpr std::string_view kKeyHashName = "fnv1a64(le32 term ids)+fmix64 mod 2^table_bits";

// 64-bit hash of an ascending term-id tuple.
std::uint64_t hash_term_tuple(std::span<const TermId> sorted_ids);

/// Bit table of k-term combinations seen so far in one stream.
///
/// Scoring and insertion happen in one call so that a document never
/// sees its own keys.
class KTermTable {
 public:
  explicit KTermTable(KTermParams params);

  const KTermParams& params() const noexcept { return params_; }
  std::uint64_t slots() const noexcept { return std::uint64_t{1} << params_.table_bits; }
  std::uint64_t set_count() const noexcept { return set_count_; }
  bool test(std::uint64_t key) const { return (bits_[key >> 6] >> (key & 63)) & 1U; }

  // Fraction of keys whose bit was clear, measured before the keys are
  // inserted. An empty key set scores 0 and leaves the table untouched.
  double novelty_score_and_insert(std::span<const std::uint64_t> keys);

 private:
  KTermParams params_;
  std::vector<std::uint64_t> bits_;
  std::uint64_t set_count_ = 0;
};

// Distinct slot indices of every size-k combination over the term_cap
// highest-weighted terms (ties by ascending term id). A document with fewer
// than k terms yields the single combination of all its terms.
std::vector<std::uint64_t> kterm_keys(const TermVector& doc_vector, const KTermParams& params);

struct WeightedDocument {
  std::string id;
  std::int64_t timestamp = 0;
  TermVector vector;
};

struct TopicSeed {
  std::string doc_id;
  std::size_t position = 0;  // index of the document in its stream
  double novelty = 0.0;
  TermVector seed_vector;
};

// Scores each document in order and emits a seed when novelty >= theta_new.
// Throws OrderingError if timestamps decrease.
std::vector<TopicSeed> detect(std::span<const WeightedDocument> stream, KTermTable& table, double theta_new);

}  // namespace streamoverlap
