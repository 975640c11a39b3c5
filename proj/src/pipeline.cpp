#include "streamoverlap/pipeline.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "streamoverlap/categories.hpp"
#include "streamoverlap/entities.hpp"
#include "streamoverlap/error.hpp"
#include "streamoverlap/kmeans.hpp"
#include "streamoverlap/report.hpp"

namespace streamoverlap {

namespace {

constexpr std::string_view kTfIdfName = "raw tf * ln(n_docs/df)";
constexpr std::string_view kTokenizerName = "word-boundary+casefold, CJK bigrams, min 2 chars";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: " + key + " expects a number, got '" + v + "'");
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (!v.empty() && v.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(v);
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("config: " + key + " expects a non-negative integer, got '" + v + "'");
}

bool valid_stream_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

StreamInput& stream_entry(std::vector<StreamInput>& streams, const std::string& id) {
  for (auto& s : streams) {
    if (s.id == id) return s;
  }
  streams.push_back({id, {}, {}});
  return streams.back();
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

void write_file(const std::filesystem::path& path, const std::string& content, RunSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StageError("write", "", "cannot open " + path.string());
  out << content;
  if (!out) throw StageError("write", "", "cannot write " + path.string());
  summary.outputs.push_back(path);
}

template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer, RunSummary& summary) {
  std::ostringstream buf;
  writer(buf);
  write_file(path, buf.str(), summary);
}

class TempFile {
 public:
  TempFile() {
    auto pattern = (std::filesystem::temp_directory_path() / "streamoverlap-XXXXXX").string();
    const int fd = ::mkstemp(pattern.data());
    if (fd < 0) throw StageError("translate", "", "cannot create a temporary file");
    ::close(fd);
    path_ = pattern;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.rfind("stream.", 0) == 0) {
    const auto id = key.substr(7);
    if (!valid_stream_id(id)) throw ValidationError("config: invalid stream id '" + id + "'");
    stream_entry(streams, id).path = value;
  } else if (key.rfind("translator.", 0) == 0) {
    const auto id = key.substr(11);
    if (!valid_stream_id(id)) throw ValidationError("config: invalid stream id '" + id + "'");
    stream_entry(streams, id).translator = value;
  } else if (key == "theta_new") {
    theta_new = parse_double(key, value);
  } else if (key == "theta_track") {
    theta_track = parse_double(key, value);
  } else if (key == "theta_align") {
    theta_align = parse_double(key, value);
  } else if (key == "k_hash") {
    kterm.k = static_cast<std::uint32_t>(parse_uint(key, value));
  } else if (key == "term_cap") {
    kterm.term_cap = static_cast<std::uint32_t>(parse_uint(key, value));
  } else if (key == "table_bits") {
    kterm.table_bits = static_cast<std::uint32_t>(parse_uint(key, value));
  } else if (key == "k_centroid") {
    k_centroid = parse_uint(key, value);
  } else if (key == "kmeans_k") {
    kmeans_k = parse_uint(key, value);
  } else if (key == "kmeans_seed") {
    kmeans_seed = parse_uint(key, value);
  } else if (key == "kmeans_max_iters") {
    kmeans_max_iters = parse_uint(key, value);
  } else if (key == "sample_n") {
    sample_n = parse_uint(key, value);
  } else if (key == "sample_seed") {
    sample_seed = parse_uint(key, value);
  } else if (key == "intensity_tm") {
    intensity_tm = value;
  } else if (key == "intensity_sm") {
    intensity_sm = value;
  } else if (key == "intensity_top_n") {
    intensity_top_n = parse_uint(key, value);
  } else if (key == "cluster_a") {
    cluster_a = value;
  } else if (key == "cluster_b") {
    cluster_b = value;
  } else if (key == "max_malformed_fraction") {
    max_malformed_fraction = parse_double(key, value);
  } else if (key == "stopwords") {
    stopwords = value;
  } else if (key == "lexicon") {
    lexicon = value;
  } else if (key == "output") {
    output = value;
  } else {
    throw ValidationError("config: unknown key '" + key + "'");
  }
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(fmt::format("{}:{}: expected key=value", source, line_no));
    }
    try {
      config.set(stripped.substr(0, eq), stripped.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::vector<std::string> RunConfig::validate(bool require_streams) const {
  std::vector<std::string> errors;
  auto threshold = [&](const char* name, double v) {
    if (!(v > 0.0 && v <= 1.0)) errors.push_back(fmt::format("{} must be in (0, 1], got {}", name, v));
  };
  threshold("theta_new", theta_new);
  threshold("theta_track", theta_track);
  threshold("theta_align", theta_align);
  if (kterm.k < 1) errors.push_back("k_hash must be >= 1");
  if (kterm.term_cap < kterm.k) errors.push_back("term_cap must be >= k_hash");
  if (kterm.table_bits < 6 || kterm.table_bits > 40) errors.push_back("table_bits must be in [6, 40]");
  if (k_centroid < 1) errors.push_back("k_centroid must be >= 1");
  if (kmeans_k < 1) errors.push_back("kmeans_k must be >= 1");
  if (kmeans_max_iters < 1) errors.push_back("kmeans_max_iters must be >= 1");
  if (intensity_top_n < 1) errors.push_back("intensity_top_n must be >= 1");
  if (!(max_malformed_fraction >= 0.0 && max_malformed_fraction <= 1.0)) {
    errors.push_back("max_malformed_fraction must be in [0, 1]");
  }
  if (require_streams && streams.size() < 2) errors.push_back("at least two streams are required");
  auto known = [&](const std::string& id) {
    return std::any_of(streams.begin(), streams.end(), [&](const StreamInput& s) { return s.id == id; });
  };
  for (const auto& s : streams) {
    if (s.path.empty()) {
      errors.push_back("stream " + s.id + " has no path");
    } else if (!std::filesystem::exists(s.path)) {
      errors.push_back("stream " + s.id + ": " + s.path.string() + " does not exist");
    }
  }
  if (intensity_tm.empty() != intensity_sm.empty()) errors.push_back("intensity_tm and intensity_sm go together");
  if (!intensity_tm.empty()) {
    if (!known(intensity_tm)) errors.push_back("intensity_tm names unknown stream " + intensity_tm);
    if (!known(intensity_sm)) errors.push_back("intensity_sm names unknown stream " + intensity_sm);
    if (intensity_tm == intensity_sm) errors.push_back("intensity_tm and intensity_sm must differ");
  }
  if (cluster_a.empty() != cluster_b.empty()) errors.push_back("cluster_a and cluster_b go together");
  if (!cluster_a.empty()) {
    if (!known(cluster_a)) errors.push_back("cluster_a names unknown stream " + cluster_a);
    if (!known(cluster_b)) errors.push_back("cluster_b names unknown stream " + cluster_b);
    if (cluster_a == cluster_b) errors.push_back("cluster_a and cluster_b must differ");
  }
  if (!stopwords.empty() && !std::filesystem::exists(stopwords)) {
    errors.push_back("stopwords file " + stopwords.string() + " does not exist");
  }
  if (!lexicon.empty() && !std::filesystem::exists(lexicon)) {
    errors.push_back("lexicon file " + lexicon.string() + " does not exist");
  }
  return errors;
}

std::string RunConfig::manifest() const {
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) { out += fmt::format("{}={}\n", k, v); };
  for (const auto& s : streams) {
    line("stream." + s.id, s.path.string());
    if (!s.translator.empty()) line("translator." + s.id, s.translator);
  }
  line("theta_new", fmt_double(theta_new));
  line("theta_track", fmt_double(theta_track));
  line("theta_align", fmt_double(theta_align));
  line("k_hash", std::to_string(kterm.k));
  line("term_cap", std::to_string(kterm.term_cap));
  line("table_bits", std::to_string(kterm.table_bits));
  line("k_centroid", std::to_string(k_centroid));
  line("kmeans_k", std::to_string(kmeans_k));
  line("kmeans_seed", std::to_string(kmeans_seed));
  line("kmeans_max_iters", std::to_string(kmeans_max_iters));
  line("sample_n", std::to_string(sample_n));
  line("sample_seed", std::to_string(sample_seed));
  if (!intensity_tm.empty()) {
    line("intensity_tm", intensity_tm);
    line("intensity_sm", intensity_sm);
  }
  line("intensity_top_n", std::to_string(intensity_top_n));
  if (!cluster_a.empty()) {
    line("cluster_a", cluster_a);
    line("cluster_b", cluster_b);
  }
  line("max_malformed_fraction", fmt_double(max_malformed_fraction));
  if (!stopwords.empty()) line("stopwords", stopwords.string());
  if (!lexicon.empty()) line("lexicon", lexicon.string());
  line("output", output.string());
  return out;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

std::vector<Document> translate_adapter(std::vector<Document> docs, const std::string& command) {
  if (command.empty() || docs.empty()) return docs;
  const TempFile input;
  const TempFile output;
  {
    std::ofstream in(input.path(), std::ios::binary);
    for (const auto& d : docs) {
      std::string line = d.text;
      std::replace(line.begin(), line.end(), '\n', ' ');
      std::replace(line.begin(), line.end(), '\r', ' ');
      in << line << '\n';
    }
    if (!in) throw StageError("translate", "", "cannot write adapter input");
  }
  const std::string shell = "( " + command + " ) < " + shell_quote(input.path().string()) + " > " +
                            shell_quote(output.path().string());
  const int status = std::system(shell.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw StageError("translate", "",
                     fmt::format("command '{}' failed (status {})", command,
                                 status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : -1)));
  }
  std::ifstream out(output.path(), std::ios::binary);
  std::vector<std::string> lines;
  for (std::string line; std::getline(out, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (lines.size() != docs.size()) {
    throw StageError("translate", "",
                     fmt::format("command '{}' returned {} lines for {} documents", command, lines.size(),
                                 docs.size()));
  }
  for (std::size_t i = 0; i < docs.size(); ++i) docs[i].text = std::move(lines[i]);
  return docs;
}

PreparedStream prepare_stream(std::string id, std::vector<Document> docs, const TextPrep& prep) {
  PreparedStream s;
  s.id = std::move(id);
  s.terms.reserve(docs.size());
  for (const auto& d : docs) s.terms.push_back(prep.terms(d.text));
  s.docs = std::move(docs);
  return s;
}

TermDictionary build_dictionary(std::span<const PreparedStream> streams) {
  TermDictionary merged;
  for (const auto& s : streams) {
    TermDictionary local;
    for (const auto& terms : s.terms) local.update_statistics(terms);
    merged.merge(local);
  }
  merged.freeze();
  return merged;
}

std::vector<WeightedDocument> weigh_stream(const PreparedStream& stream, const TermDictionary& dict) {
  std::vector<WeightedDocument> out;
  out.reserve(stream.docs.size());
  if (dict.n_docs() == 0) {
    for (const auto& d : stream.docs) out.push_back({d.id, d.timestamp, {}});
    return out;
  }
  for (std::size_t i = 0; i < stream.docs.size(); ++i) {
    out.push_back({stream.docs[i].id, stream.docs[i].timestamp, weigh(dict, stream.terms[i])});
  }
  return out;
}

ParamRecord profile_params(const RunConfig& config, const TermDictionary& dict) {
  return {{"theta_new", fmt_double(config.theta_new)},
          {"theta_track", fmt_double(config.theta_track)},
          {"theta_align", fmt_double(config.theta_align)},
          {"k_hash", std::to_string(config.kterm.k)},
          {"term_cap", std::to_string(config.kterm.term_cap)},
          {"table_bits", std::to_string(config.kterm.table_bits)},
          {"key_hash", std::string(kKeyHashName)},
          {"k_centroid", std::to_string(config.k_centroid)},
          {"tfidf", std::string(kTfIdfName)},
          {"tokenizer", std::string(kTokenizerName)},
          {"stopwords", config.stopwords.string()},
          {"dictionary_docs", std::to_string(dict.n_docs())},
          {"dictionary_terms", std::to_string(dict.size())}};
}

TrackedStream detect_and_track(std::string_view stream_id, std::span<const WeightedDocument> docs,
                               const RunConfig& config, const TermDictionary& dict) {
  TrackedStream out;
  KTermTable table(config.kterm);
  out.seeds = detect(docs, table, config.theta_new);
  out.profile = track(stream_id, docs, out.seeds, config.tracking());
  out.profile.params = profile_params(config, dict);
  return out;
}

TextPrep make_text_prep(const RunConfig& config) {
  TextPrep prep;
  if (!config.stopwords.empty()) prep.stopwords = load_stopwords(config.stopwords);
  return prep;
}

std::vector<PreparedStream> load_streams(const RunConfig& config, const TextPrep& prep,
                                         std::vector<std::string>& warnings) {
  std::vector<PreparedStream> streams;
  for (const auto& input : config.streams) {
    IngestResult ingested;
    try {
      ingested = ingest(input.path, input.id, config.max_malformed_fraction);
    } catch (const ValidationError& e) {
      throw ValidationError("ingest [" + input.id + "]: " + e.what());
    }
    for (const auto& w : ingested.report.warnings) warnings.push_back(w);
    std::vector<Document> docs;
    try {
      docs = translate_adapter(std::move(ingested.docs), input.translator);
    } catch (const StageError& e) {
      const std::string msg = e.what();
      throw StageError(e.stage(), input.id, msg.substr(msg.find(": ") + 2));
    }
    auto prepared = prepare_stream(input.id, std::move(docs), prep);
    prepared.ingest = std::move(ingested.report);
    streams.push_back(std::move(prepared));
  }
  return streams;
}

// ---------------------------------------------------------------------------
// Full run
// ---------------------------------------------------------------------------

namespace {

const StreamProfile& profile_for(const std::vector<TrackedStream>& tracked, const std::vector<PreparedStream>& streams,
                                 const std::string& id) {
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i].id == id) return tracked[i].profile;
  }
  throw ValidationError("unknown stream " + id);
}

std::size_t stream_index(const std::vector<PreparedStream>& streams, const std::string& id) {
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i].id == id) return i;
  }
  throw ValidationError("unknown stream " + id);
}

}  // namespace

std::vector<IntensityRow> intensity_report(std::span<const Document> tm_docs, const StreamProfile& tm,
                                           const StreamProfile& sm, const TextPrep& prep, double theta_align,
                                           std::size_t top_n) {
  CategoryModel model;
  try {
    model = train_categories(tm_docs, prep);
  } catch (const ValidationError& e) {
    throw StageError("intensity", tm.stream_id, e.what());
  }
  std::unordered_map<std::string, const Document*> by_id;
  for (const auto& d : tm_docs) by_id.emplace(d.id, &d);

  std::vector<TopicClassification> classified;
  for (const auto& cluster : tm.clusters) {
    std::vector<std::string> texts;
    for (const auto& id : cluster.member_ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw StageError("intensity", tm.stream_id, "no document text for member " + id);
      texts.push_back(it->second->text);
    }
    classified.push_back(classify_topic(model, cluster, texts, prep));
  }

  std::vector<IntensityRow> rows;
  std::vector<TopicClassification> selected;
  for (const Category c : kAllCategories) {
    const auto ranked = top_ranked(classified, c, top_n);
    IntensityRow row;
    row.category = c;
    row.classified = static_cast<std::size_t>(
        std::count_if(classified.begin(), classified.end(), [&](const auto& t) { return t.category == c; }));
    row.selected = ranked.topics.size();
    row.short_supply = ranked.short_supply;
    rows.push_back(row);
    selected.insert(selected.end(), ranked.topics.begin(), ranked.topics.end());
  }
  const auto edges = align(tm, sm, theta_align);
  const auto totals = intensity(selected, edges, sm);
  for (auto& row : rows) row.sm_messages = totals.at(row.category);
  return rows;
}

std::vector<KMeansReportCluster> cluster_mutually_aligned(const StreamProfile& a, const StreamProfile& b,
                                                          const Vocabulary& vocab, double theta_align, std::size_t k,
                                                          std::uint64_t seed, std::size_t max_iters,
                                                          std::vector<std::string>& warnings) {
  const auto forward = align(a, b, theta_align);
  const auto backward = align(b, a, theta_align);
  std::unordered_map<std::uint32_t, std::uint32_t> back;
  for (const auto& e : backward) back.emplace(e.src_topic, e.dst_topic);
  std::unordered_map<std::uint32_t, const TopicCluster*> a_by_id;
  std::unordered_map<std::uint32_t, const TopicCluster*> b_by_id;
  for (const auto& c : a.clusters) a_by_id.emplace(c.topic_id, &c);
  for (const auto& c : b.clusters) b_by_id.emplace(c.topic_id, &c);

  std::vector<TermVector> vectors;
  std::vector<std::string> labels;
  for (const auto& e : forward) {
    const auto it = back.find(e.dst_topic);
    if (it == back.end() || it->second != e.src_topic) continue;
    vectors.push_back(a_by_id.at(e.src_topic)->centroid);
    labels.push_back(fmt::format("{}:{}", a.stream_id, e.src_topic));
    vectors.push_back(b_by_id.at(e.dst_topic)->centroid);
    labels.push_back(fmt::format("{}:{}", b.stream_id, e.dst_topic));
  }
  if (vectors.empty()) {
    warnings.push_back("cluster: no mutually aligned topics between " + a.stream_id + " and " + b.stream_id);
    return {};
  }
  if (k > vectors.size()) {
    warnings.push_back(fmt::format("cluster: K reduced from {} to {} (number of mutually aligned centroids)", k,
                                   vectors.size()));
    k = vectors.size();
  }
  const auto result = kmeans(vectors, k, seed, max_iters);
  std::vector<KMeansReportCluster> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    out[c].index = c;
    const auto top = result.centroids[c].truncated(10);
    std::vector<TermWeight> entries(top.entries().begin(), top.entries().end());
    std::sort(entries.begin(), entries.end(), [](const TermWeight& x, const TermWeight& y) {
      return x.weight != y.weight ? x.weight > y.weight : x.term < y.term;
    });
    for (const auto& e : entries) out[c].top_terms.emplace_back(vocab.term(e.term), e.weight);
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) out[result.assignment[i]].members.push_back(labels[i]);
  return out;
}

RunSummary run_pipeline(const RunConfig& config) {
  if (const auto errors = config.validate(); !errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  RunSummary summary;
  const auto& out_dir = config.output;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw StageError("output", "", "cannot create " + out_dir.string() + ": " + ec.message());

  const TextPrep prep = make_text_prep(config);
  auto streams = load_streams(config, prep, summary.warnings);

  const TermDictionary dict = build_dictionary(streams);

  // Per-stream detection and tracking are independent once the dictionary
  // is frozen.
  std::vector<std::future<TrackedStream>> jobs;
  for (const auto& s : streams) {
    jobs.push_back(std::async(std::launch::async, [&s, &dict, &config] {
      const auto weighted = weigh_stream(s, dict);
      return detect_and_track(s.id, weighted, config, dict);
    }));
  }
  std::vector<TrackedStream> tracked;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      tracked.push_back(jobs[i].get());
    } catch (const std::exception& e) {
      throw StageError("detect/track", streams[i].id, e.what());
    }
  }

  std::vector<StreamProfile> profiles;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const auto& t = tracked[i];
    profiles.push_back(t.profile);
    summary.streams.push_back({streams[i].id, streams[i].docs.size(), streams[i].ingest.malformed_lines.size(),
                               t.seeds.size(), t.profile.clusters_before_pruning, t.profile.clusters.size()});
    write_with(out_dir / ("profile." + streams[i].id + ".jsonl"),
               [&](std::ostream& o) { write_profile(o, t.profile, dict.vocabulary()); }, summary);
    write_with(out_dir / ("seeds." + streams[i].id + ".jsonl"), [&](std::ostream& o) { write_seeds(o, t.seeds); },
               summary);
  }

  // Alignment of every ordered pair.
  summary.matrix = OverlapMatrix([&] {
    std::vector<std::string> ids;
    for (const auto& s : streams) ids.push_back(s.id);
    return ids;
  }());
  std::string cells = "from\tto\tpercent\taligned_topics\tsource_topics\n";
  for (std::size_t a = 0; a < profiles.size(); ++a) {
    for (std::size_t b = 0; b < profiles.size(); ++b) {
      if (a == b) continue;
      const auto edges = align(profiles[a], profiles[b], config.theta_align);
      const double pct = overlap(profiles[a], edges);
      summary.matrix.set(a, b, pct);
      cells += fmt::format("{}\t{}\t{:.6f}\t{}\t{}\n", profiles[a].stream_id, profiles[b].stream_id, pct, edges.size(),
                           profiles[a].clusters.size());
      const auto stem = profiles[a].stream_id + "." + profiles[b].stream_id;
      write_with(out_dir / ("edges." + stem + ".jsonl"), [&](std::ostream& o) { write_edges(o, edges); }, summary);
      if (config.sample_n > 0) {
        const auto sample = sample_unaligned(profiles[a], edges, config.sample_n, config.sample_seed);
        std::string text;
        for (const auto id : sample) text += std::to_string(id) + "\n";
        write_file(out_dir / ("unaligned." + stem + ".txt"), text, summary);
      }
    }
  }
  write_file(out_dir / "overlap_cells.tsv", cells, summary);
  const auto overlap_tsv = render_overlap_tsv(summary.matrix);
  const auto overlap_md = render_overlap_markdown(summary.matrix);
  write_file(out_dir / "overlap.tsv", overlap_tsv, summary);
  write_file(out_dir / "overlap.md", overlap_md, summary);

  std::string streams_tsv = "stream\tdocuments\tmalformed_lines\tdetected_topics\tclusters_before_pruning\tclusters\n";
  std::string streams_md =
      "| stream | documents | malformed lines | detected topics | clusters before pruning | clusters |\n"
      "|---|---|---|---|---|---|\n";
  for (const auto& s : summary.streams) {
    streams_tsv += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", s.id, s.documents, s.malformed, s.detected_topics,
                               s.clusters_before_pruning, s.clusters_after_pruning);
    streams_md += fmt::format("| {} | {} | {} | {} | {} | {} |\n", s.id, s.documents, s.malformed, s.detected_topics,
                              s.clusters_before_pruning, s.clusters_after_pruning);
  }
  write_file(out_dir / "streams.tsv", streams_tsv, summary);

  std::string report = "# Stream overlap report\n\n## Streams\n\n" + streams_md + "\n## Directed overlap\n\n" + overlap_md;

  if (!config.intensity_tm.empty()) {
    const auto& tm_docs = streams[stream_index(streams, config.intensity_tm)].docs;
    const auto rows = intensity_report(tm_docs, profile_for(tracked, streams, config.intensity_tm),
                                       profile_for(tracked, streams, config.intensity_sm), prep, config.theta_align,
                                       config.intensity_top_n);
    write_file(out_dir / "intensity.tsv", render_intensity_tsv(rows), summary);
    const auto md = render_intensity_markdown(rows);
    write_file(out_dir / "intensity.md", md, summary);
    report += fmt::format("\n## Alignment intensity ({} -> {})\n\n", config.intensity_tm, config.intensity_sm) + md;
  }

  if (!config.cluster_a.empty()) {
    const auto clusters = cluster_mutually_aligned(
        profile_for(tracked, streams, config.cluster_a), profile_for(tracked, streams, config.cluster_b),
        dict.vocabulary(), config.theta_align, config.kmeans_k, config.kmeans_seed, config.kmeans_max_iters,
        summary.warnings);
    write_file(out_dir / "kmeans.tsv", render_kmeans_tsv(clusters), summary);
    const auto md = render_kmeans_markdown(clusters);
    write_file(out_dir / "kmeans.md", md, summary);
    report += fmt::format("\n## Topical clusters of mutually aligned topics ({} / {})\n\n", config.cluster_a,
                          config.cluster_b) + md;
  }

  if (!config.lexicon.empty()) {
    EntityLexicon lexicon;
    try {
      lexicon = EntityLexicon::load(config.lexicon);
    } catch (const ValidationError& e) {
      throw ValidationError("lexicon: " + std::string(e.what()));
    }
    MentionCounts counts;
    for (const auto& s : streams) counts.merge(count_mentions(lexicon, s.docs));
    std::vector<std::string> ids;
    for (const auto& s : streams) ids.push_back(s.id);
    const auto mentions = render_mentions_tsv(lexicon, counts, ids);
    write_file(out_dir / "mentions.tsv", mentions, summary);
    const auto shares = bias_report(counts);
    write_file(out_dir / "bias.tsv", render_bias_tsv(shares), summary);
    const auto md = render_bias_markdown(shares);
    write_file(out_dir / "bias.md", md, summary);
    report += "\n## Entity origin bias\n\n" + md;
  }

  std::string manifest = config.manifest();
  for (const auto& [k, v] : profile_params(config, dict)) {
    if (k == "key_hash" || k == "tfidf" || k == "tokenizer" || k == "dictionary_docs" || k == "dictionary_terms") {
      manifest += "# " + k + "=" + v + "\n";
    }
  }
  write_file(out_dir / "manifest.txt", manifest, summary);
  report += "\n## Parameters\n\n```\n" + manifest + "```\n";
  if (!summary.warnings.empty()) {
    report += "\n## Warnings\n\n";
    for (const auto& w : summary.warnings) report += "- " + w + "\n";
  }
  write_file(out_dir / "report.md", report, summary);
  return summary;
}

}  // namespace streamoverlap
