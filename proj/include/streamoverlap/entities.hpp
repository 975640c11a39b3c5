#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamoverlap/document.hpp"

namespace streamoverlap {

enum class Origin : std::uint8_t { usa, china };
enum class Role : std::uint8_t { musician, actor, athlete };

inline constexpr std::array<Origin, 2> kAllOrigins = {Origin::usa, Origin::china};

std::string_view to_string(Origin o);
std::string_view to_string(Role r);
std::optional<Origin> parse_origin(std::string_view s);
std::optional<Role> parse_role(std::string_view s);

struct Person {
  std::string canonical;
  std::vector<std::string> variants;
  Origin origin = Origin::usa;
  Role role = Role::musician;
};

// A matched variant: tokens [first, first + length) of segment_words(text).
struct MentionSpan {
  std::size_t first = 0;
  std::size_t length = 0;
  std::size_t person = 0;

  friend bool operator==(const MentionSpan&, const MentionSpan&) = default;
};

/// Person name variants compiled into a token trie.
///
/// Variants are compared as case-folded word sequences, so "Taylor  Swift"
/// and "taylor swift" are the same variant. A variant shared by two persons
/// is rejected at construction.
class EntityLexicon {
 public:
  EntityLexicon() = default;
  explicit EntityLexicon(std::vector<Person> persons);

  // Line-delimited JSON: {"canonical", "variants": [...], "origin", "role"}.
  static EntityLexicon load(const std::filesystem::path& path);

  std::span<const Person> persons() const noexcept { return persons_; }
  bool empty() const noexcept { return persons_.empty(); }

  // Non-overlapping matches chosen longest first (then leftmost), returned
  // in text order.
  std::vector<MentionSpan> find_mentions(std::span<const std::string> tokens) const;

 private:
  struct Node {
    std::map<std::string, std::size_t, std::less<>> next;
    std::optional<std::size_t> person;
  };

  std::vector<Person> persons_;
  std::vector<Node> trie_{Node{}};
};

struct MentionCounts {
  // stream id -> canonical name -> mentions
  std::map<std::string, std::map<std::string, std::uint64_t>> per_stream;
  // stream id -> origin -> mentions
  std::map<std::string, std::map<Origin, std::uint64_t>> origin_totals;

  // Associative: counting two document partitions and merging equals
  // counting their concatenation.
  void merge(const MentionCounts& other);
};

MentionCounts count_mentions(const EntityLexicon& lexicon, std::span<const Document> docs);

struct OriginShares {
  std::string stream_id;
  std::map<Origin, std::uint64_t> mentions;
  // Percent of the stream's mentions per origin; empty when it has none.
  std::optional<std::map<Origin, double>> percent;
};

std::vector<OriginShares> bias_report(const MentionCounts& counts);

}  // namespace streamoverlap
