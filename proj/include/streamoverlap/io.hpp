#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamoverlap/alignment.hpp"
#include "streamoverlap/detection.hpp"
#include "streamoverlap/document.hpp"
#include "streamoverlap/synth.hpp"
#include "streamoverlap/text.hpp"
#include "streamoverlap/tracking.hpp"

namespace streamoverlap {

// Document files: one JSON object per line with "id" (string), "timestamp"
// (integer seconds, >= 0), "text" (non-blank string) and optional
// "category". stream_id is not stored; it comes from the caller.
void write_documents(std::ostream& out, std::span<const Document> docs);

struct IngestReport {
  std::size_t records = 0;  // non-blank lines
  std::vector<std::size_t> malformed_lines;  // 1-based
  std::vector<std::string> warnings;
};

struct IngestResult {
  std::vector<Document> docs;  // stable-sorted by timestamp
  IngestReport report;
};

// Malformed lines are skipped and reported while they stay at or below
// max_malformed_fraction of the records; above that, or on a duplicate id,
// a ValidationError lists the offending lines.
IngestResult ingest(std::istream& in, std::string_view stream_id, std::string_view source,
                    double max_malformed_fraction = 0.01);
IngestResult ingest(const std::filesystem::path& path, std::string_view stream_id,
                    double max_malformed_fraction = 0.01);

// Profile files: a header record {"record":"header", "stream_id", "params",
// "clusters_before_pruning", "clusters"} followed by one record per cluster
// {"record":"cluster", "topic_id", "member_count", "members", "centroid"},
// where centroid is a list of [term, weight] pairs in term-id order.
void write_profile(std::ostream& out, const StreamProfile& profile, const Vocabulary& vocab);

// Terms are interned into `vocab`, so profiles read into one vocabulary
// share a term-id space.
StreamProfile read_profile(std::istream& in, Vocabulary& vocab);

// Edge files: {"src_topic", "dst_topic", "similarity"} per line.
void write_edges(std::ostream& out, std::span<const AlignmentEdge> edges);
std::vector<AlignmentEdge> read_edges(std::istream& in);

// Seed files: {"doc_id", "position", "novelty"} per line.
void write_seeds(std::ostream& out, std::span<const TopicSeed> seeds);

// Ground truth: {"record":"summary",...}, then "topic", "doc" and "mention"
// records.
void write_ground_truth(std::ostream& out, const GroundTruth& truth, std::string_view stream_a,
                        std::string_view stream_b);

}  // namespace streamoverlap
