#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamoverlap/alignment.hpp"
#include "streamoverlap/detection.hpp"
#include "streamoverlap/document.hpp"
#include "streamoverlap/io.hpp"
#include "streamoverlap/report.hpp"
#include "streamoverlap/text.hpp"
#include "streamoverlap/tracking.hpp"

namespace streamoverlap {

struct StreamInput {
  std::string id;
  std::filesystem::path path;
  std::string translator;  // shell command; empty means identity
};

/// Every knob of a run. Defaults make a config with two streams runnable.
///
/// Text form is flat `key=value` lines with '#' comments. Streams are
/// `stream.<id>=<path>` and `translator.<id>=<command>`, in file order.
struct RunConfig {
  std::vector<StreamInput> streams;
  double theta_new = 0.5;
  double theta_track = 0.6;
  double theta_align = 0.65;
  KTermParams kterm;
  std::size_t k_centroid = 100;
  std::size_t kmeans_k = 30;
  std::uint64_t kmeans_seed = 1;
  std::size_t kmeans_max_iters = 100;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 1;
  std::string intensity_tm;
  std::string intensity_sm;
  std::size_t intensity_top_n = 500;
  std::string cluster_a;
  std::string cluster_b;
  double max_malformed_fraction = 0.01;
  std::filesystem::path stopwords;
  std::filesystem::path lexicon;
  std::filesystem::path output = "streamoverlap-out";

  // Throws ValidationError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text, const std::string& source = "config");

  // Problems that prevent a run; empty when valid.
  std::vector<std::string> validate(bool require_streams = true) const;

  // key=value lines that reproduce this configuration.
  std::string manifest() const;

  TrackingParams tracking() const { return {theta_track, k_centroid}; }
};

// Pipes each document's text, one line per document, through `command`.
// Line breaks inside a text are sent as spaces. Metadata is untouched.
// Throws StageError when the command fails or its line count differs.
std::vector<Document> translate_adapter(std::vector<Document> docs, const std::string& command);

// A stream after ingestion and preprocessing.
struct PreparedStream {
  std::string id;
  std::vector<Document> docs;
  std::vector<std::vector<std::string>> terms;  // per document
  IngestReport ingest;
};

TextPrep make_text_prep(const RunConfig& config);

// Ingests, translates and preprocesses every configured stream in order.
// Ingest warnings are appended to `warnings`.
std::vector<PreparedStream> load_streams(const RunConfig& config, const TextPrep& prep,
                                         std::vector<std::string>& warnings);

PreparedStream prepare_stream(std::string id, std::vector<Document> docs, const TextPrep& prep);

// Per-stream dictionaries merged in stream order, then frozen.
TermDictionary build_dictionary(std::span<const PreparedStream> streams);

std::vector<WeightedDocument> weigh_stream(const PreparedStream& stream, const TermDictionary& dict);

struct TrackedStream {
  std::vector<TopicSeed> seeds;
  StreamProfile profile;
};

// detect, then track and prune, with the config's parameters recorded.
TrackedStream detect_and_track(std::string_view stream_id, std::span<const WeightedDocument> docs,
                               const RunConfig& config, const TermDictionary& dict);

// Parameter record shared by every profile of a run.
ParamRecord profile_params(const RunConfig& config, const TermDictionary& dict);

// Classifies TM topics with a model trained on the labeled TM documents,
// keeps the top_n per category and totals the SM messages aligned to them.
std::vector<IntensityRow> intensity_report(std::span<const Document> tm_docs, const StreamProfile& tm,
                                           const StreamProfile& sm, const TextPrep& prep, double theta_align,
                                           std::size_t top_n);

// k-means over the centroids of topic pairs aligned in both directions.
// K is reduced to the number of centroids when larger, with a warning.
std::vector<KMeansReportCluster> cluster_mutually_aligned(const StreamProfile& a, const StreamProfile& b,
                                                          const Vocabulary& vocab, double theta_align, std::size_t k,
                                                          std::uint64_t seed, std::size_t max_iters,
                                                          std::vector<std::string>& warnings);

struct StreamStats {
  std::string id;
  std::size_t documents = 0;
  std::size_t malformed = 0;
  std::size_t detected_topics = 0;
  std::size_t clusters_before_pruning = 0;
  std::size_t clusters_after_pruning = 0;
};

struct RunSummary {
  std::vector<StreamStats> streams;
  OverlapMatrix matrix{{}};
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> outputs;
};

/// Full run: ingest, translate, preprocess, merged dictionary, detection,
/// tracking and pruning per stream, alignment of every ordered stream pair,
/// then the configured analyses. Everything is written to config.output.
/// Errors are rethrown as StageError naming the stage and stream, except
/// ValidationError for invalid configuration or input.
RunSummary run_pipeline(const RunConfig& config);

}  // namespace streamoverlap
