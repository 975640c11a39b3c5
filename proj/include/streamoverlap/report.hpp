#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "streamoverlap/alignment.hpp"
#include "streamoverlap/categories.hpp"
#include "streamoverlap/entities.hpp"
#include "streamoverlap/kmeans.hpp"

namespace streamoverlap {

// Integer percentage as printed in overlap tables: "0%", "<1%" for values
// in (0, 1), otherwise rounded half away from zero ("98.4" -> "98%").
std::string format_percent(double percent);

// Rows are "from" streams, columns "to" streams, diagonal "—".
std::string render_overlap_tsv(const OverlapMatrix& matrix);
std::string render_overlap_markdown(const OverlapMatrix& matrix);

// Parses "from<TAB>to<TAB>percent[<TAB>...]" lines ('#' comments and a
// leading "from to percent" header allowed) into a matrix whose streams
// appear in first-mention order. Extra columns are ignored.
OverlapMatrix parse_overlap_cells(const std::string& tsv);

struct IntensityRow {
  Category category;
  std::size_t classified = 0;  // TM topics assigned to the category
  std::size_t selected = 0;    // top-ranked topics used
  bool short_supply = false;
  std::uint64_t sm_messages = 0;
};

std::string render_intensity_tsv(std::span<const IntensityRow> rows);
std::string render_intensity_markdown(std::span<const IntensityRow> rows);

// One row per stream and person, streams in the given order, persons in
// lexicon order.
std::string render_mentions_tsv(const EntityLexicon& lexicon, const MentionCounts& counts,
                                std::span<const std::string> stream_ids);

std::string render_bias_tsv(std::span<const OriginShares> shares);
std::string render_bias_markdown(std::span<const OriginShares> shares);

struct KMeansReportCluster {
  std::size_t index = 0;
  std::vector<std::string> members;                      // "stream:topic"
  std::vector<std::pair<std::string, double>> top_terms;  // highest centroid weights
};

std::string render_kmeans_tsv(std::span<const KMeansReportCluster> clusters);
std::string render_kmeans_markdown(std::span<const KMeansReportCluster> clusters);

}  // namespace streamoverlap
