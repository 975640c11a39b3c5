#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "streamoverlap/alignment.hpp"
#include "streamoverlap/entities.hpp"
#include "streamoverlap/error.hpp"
#include "streamoverlap/io.hpp"
#include "streamoverlap/pipeline.hpp"
#include "streamoverlap/report.hpp"
#include "streamoverlap/synth.hpp"

namespace so = streamoverlap;
namespace fs = std::filesystem;

namespace {

// Options shared by every subcommand that reads document streams.
struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;  // applied last, in order
};

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw so::ValidationError(fmt::format("{} expects key=value, got '{}'", what, s));
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

void add_common(CLI::App* cmd, Common& c, bool with_detection) {
  auto flag = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        name, [&c, key](const std::string& v) { c.flags.emplace_back(key, v); }, help);
  };
  cmd->add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "configuration override key=value (repeatable)");
  cmd->add_option_function<std::vector<std::string>>(
      "--stream",
      [&c](const std::vector<std::string>& v) {
        for (const auto& s : v) {
          const auto [id, path] = split_assignment(s, "--stream");
          c.flags.emplace_back("stream." + id, path);
        }
      },
      "input stream id=path (repeatable, order matters)");
  cmd->add_option_function<std::vector<std::string>>(
      "--translator",
      [&c](const std::vector<std::string>& v) {
        for (const auto& s : v) {
          const auto [id, command] = split_assignment(s, "--translator");
          c.flags.emplace_back("translator." + id, command);
        }
      },
      "translator command for a stream, id=command (repeatable)");
  flag("--stopwords", "stopwords", "stopword list, one word per line");
  flag("--output", "output", "output directory");
  flag("--max-malformed-fraction", "max_malformed_fraction", "tolerated share of malformed input lines");
  if (with_detection) {
    flag("--theta-new", "theta_new", "novelty threshold for topic detection");
    flag("--theta-track", "theta_track", "cosine threshold for tracking");
    flag("--theta-align", "theta_align", "cosine threshold for alignment");
    flag("--k-hash", "k_hash", "size of hashed term combinations");
    flag("--term-cap", "term_cap", "top tf.idf terms used for hashing");
    flag("--table-bits", "table_bits", "log2 of the hash table size");
    flag("--k-centroid", "k_centroid", "centroid truncation length");
  }
}

so::RunConfig build_config(const Common& c) {
  so::RunConfig config = c.config.empty() ? so::RunConfig{} : so::RunConfig::load(c.config);
  for (const auto& s : c.sets) {
    const auto [k, v] = split_assignment(s, "--set");
    config.set(k, v);
  }
  for (const auto& [k, v] : c.flags) config.set(k, v);
  return config;
}

void require_valid(const so::RunConfig& config, bool require_streams) {
  if (const auto errors = config.validate(require_streams); !errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw so::ValidationError(msg);
  }
}

void write_out(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw so::StageError("write", "", "cannot open " + path.string());
  out << content;
  if (!out) throw so::StageError("write", "", "cannot write " + path.string());
  std::cerr << "wrote " << path.string() << '\n';
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ostringstream buf;
  writer(buf);
  write_out(path, buf.str());
}

so::StreamProfile load_profile(const std::string& path, so::Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw so::ValidationError("cannot open profile " + path);
  try {
    return so::read_profile(in, vocab);
  } catch (const so::ValidationError& e) {
    throw so::ValidationError(path + ": " + e.what());
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  so::SynthSpec spec;
  std::string output = "synth";
  std::vector<std::string> multiplier_a;
  std::vector<std::string> multiplier_b;
  std::vector<std::string> mix;
  std::string lexicon;
  double entity_rate_a = 0.0;
  double entity_rate_b = 0.0;
};

std::map<so::Category, double> parse_category_map(const std::vector<std::string>& items, const char* what) {
  std::map<so::Category, double> out;
  for (const auto& item : items) {
    const auto [name, value] = split_assignment(item, what);
    const auto c = so::parse_category(name);
    if (!c) throw so::ValidationError(fmt::format("{}: unknown category '{}'", what, name));
    try {
      out[*c] = std::stod(value);
    } catch (const std::exception&) {
      throw so::ValidationError(fmt::format("{}: '{}' is not a number", what, value));
    }
  }
  return out;
}

int run_generate(GenerateArgs& g) {
  auto& spec = g.spec;
  spec.multiplier_a = parse_category_map(g.multiplier_a, "--multiplier-a");
  spec.multiplier_b = parse_category_map(g.multiplier_b, "--multiplier-b");
  if (!g.mix.empty()) spec.category_mix = parse_category_map(g.mix, "--category-mix");
  if (!g.lexicon.empty()) {
    const auto lexicon = so::EntityLexicon::load(g.lexicon);
    for (const auto& p : lexicon.persons()) {
      spec.entities.push_back({p, g.entity_rate_a, g.entity_rate_b});
    }
  }
  const auto corpus = so::generate(spec);
  const fs::path dir = g.output;
  write_with(dir / (spec.stream_a + ".jsonl"), [&](std::ostream& o) { so::write_documents(o, corpus.a); });
  write_with(dir / (spec.stream_b + ".jsonl"), [&](std::ostream& o) { so::write_documents(o, corpus.b); });
  write_with(dir / "truth.jsonl",
             [&](std::ostream& o) { so::write_ground_truth(o, corpus.truth, spec.stream_a, spec.stream_b); });
  std::cout << fmt::format("{}: {} documents, {} topics\n{}: {} documents, {} topics\nshared topics: {}\n",
                           spec.stream_a, corpus.a.size(), corpus.truth.topics_a, spec.stream_b, corpus.b.size(),
                           corpus.truth.topics_b, corpus.truth.shared);
  std::cout << fmt::format("planted overlap {}->{}: {:.2f}%  {}->{}: {:.2f}%\n", spec.stream_a, spec.stream_b,
                           corpus.truth.overlap_a_to_b(), spec.stream_b, spec.stream_a,
                           corpus.truth.overlap_b_to_a());
  return 0;
}

// detect, and with `profiles` also track, every configured stream.
int run_detect_track(const Common& c, bool profiles) {
  const auto config = build_config(c);
  require_valid(config, false);
  if (config.streams.empty()) throw so::ValidationError("at least one --stream is required");
  std::vector<std::string> warnings;
  const auto prep = so::make_text_prep(config);
  const auto streams = so::load_streams(config, prep, warnings);
  const auto dict = so::build_dictionary(streams);
  for (const auto& s : streams) {
    so::TrackedStream t;
    try {
      t = so::detect_and_track(s.id, so::weigh_stream(s, dict), config, dict);
    } catch (const so::StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw so::StageError(profiles ? "detect/track" : "detect", s.id, e.what());
    }
    write_with(config.output / ("seeds." + s.id + ".jsonl"), [&](std::ostream& o) { so::write_seeds(o, t.seeds); });
    if (profiles) {
      write_with(config.output / ("profile." + s.id + ".jsonl"),
                 [&](std::ostream& o) { so::write_profile(o, t.profile, dict.vocabulary()); });
      std::cout << fmt::format("{}\t{} documents\t{} seeds\t{} clusters before pruning\t{} clusters\n", s.id,
                               s.docs.size(), t.seeds.size(), t.profile.clusters_before_pruning,
                               t.profile.clusters.size());
    } else {
      std::cout << fmt::format("{}\t{} documents\t{} seeds\n", s.id, s.docs.size(), t.seeds.size());
    }
  }
  print_warnings(warnings);
  return 0;
}

struct AlignArgs {
  std::string src;
  std::string dst;
  double theta_align = 0.65;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 1;
  std::string output = ".";
};

int run_align(const AlignArgs& a) {
  so::Vocabulary vocab;
  const auto src = load_profile(a.src, vocab);
  const auto dst = load_profile(a.dst, vocab);
  const auto edges = so::align(src, dst, a.theta_align);
  const auto stem = src.stream_id + "." + dst.stream_id;
  const fs::path dir = a.output;
  write_with(dir / ("edges." + stem + ".jsonl"), [&](std::ostream& o) { so::write_edges(o, edges); });
  if (a.sample_n > 0) {
    std::string text;
    for (const auto id : so::sample_unaligned(src, edges, a.sample_n, a.sample_seed)) text += std::to_string(id) + "\n";
    write_out(dir / ("unaligned." + stem + ".txt"), text);
  }
  const double pct = so::overlap(src, edges);
  std::cout << fmt::format("{} -> {}: {} of {} topics aligned, overlap {:.2f}% ({})\n", src.stream_id, dst.stream_id,
                           edges.size(), src.clusters.size(), pct, so::format_percent(pct));
  return 0;
}

struct OverlapArgs {
  std::vector<std::string> profiles;
  double theta_align = 0.65;
  std::string output = ".";
};

int run_overlap(const OverlapArgs& a) {
  so::Vocabulary vocab;
  std::vector<so::StreamProfile> profiles;
  for (const auto& p : a.profiles) profiles.push_back(load_profile(p, vocab));
  const auto matrix = so::overlap_matrix(profiles, a.theta_align);
  std::string cells = "from\tto\tpercent\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (i != j) {
        cells += fmt::format("{}\t{}\t{:.6f}\n", matrix.stream_ids()[i], matrix.stream_ids()[j], *matrix.at(i, j));
      }
    }
  }
  const fs::path dir = a.output;
  write_out(dir / "overlap_cells.tsv", cells);
  write_out(dir / "overlap.tsv", so::render_overlap_tsv(matrix));
  const auto md = so::render_overlap_markdown(matrix);
  write_out(dir / "overlap.md", md);
  std::cout << md;
  return 0;
}

struct IntensityArgs {
  std::string tm_profile;
  std::string sm_profile;
  std::size_t top_n = 500;
};

int run_intensity(const Common& c, const IntensityArgs& a) {
  auto config = build_config(c);
  require_valid(config, false);
  so::Vocabulary vocab;
  const auto tm = load_profile(a.tm_profile, vocab);
  const auto sm = load_profile(a.sm_profile, vocab);
  std::vector<std::string> warnings;
  const auto prep = so::make_text_prep(config);
  const auto streams = so::load_streams(config, prep, warnings);
  const so::PreparedStream* tm_docs = nullptr;
  for (const auto& s : streams) {
    if (s.id == tm.stream_id) tm_docs = &s;
  }
  if (!tm_docs) {
    throw so::ValidationError("intensity needs the documents of stream " + tm.stream_id + " (--stream " +
                              tm.stream_id + "=PATH)");
  }
  const auto rows = so::intensity_report(tm_docs->docs, tm, sm, prep, config.theta_align, a.top_n);
  write_out(config.output / "intensity.tsv", so::render_intensity_tsv(rows));
  const auto md = so::render_intensity_markdown(rows);
  write_out(config.output / "intensity.md", md);
  std::cout << md;
  print_warnings(warnings);
  return 0;
}

struct ClusterArgs {
  std::vector<std::string> profiles;
  double theta_align = 0.65;
  std::size_t k = 30;
  std::uint64_t seed = 1;
  std::size_t max_iters = 100;
  std::string output = ".";
};

int run_cluster(const ClusterArgs& a) {
  so::Vocabulary vocab;
  const auto pa = load_profile(a.profiles.at(0), vocab);
  const auto pb = load_profile(a.profiles.at(1), vocab);
  std::vector<std::string> warnings;
  const auto clusters = so::cluster_mutually_aligned(pa, pb, vocab, a.theta_align, a.k, a.seed, a.max_iters, warnings);
  const fs::path dir = a.output;
  write_out(dir / "kmeans.tsv", so::render_kmeans_tsv(clusters));
  const auto md = so::render_kmeans_markdown(clusters);
  write_out(dir / "kmeans.md", md);
  std::cout << md;
  print_warnings(warnings);
  return 0;
}

int run_mentions(const Common& c) {
  const auto config = build_config(c);
  require_valid(config, false);
  if (config.lexicon.empty()) throw so::ValidationError("mentions needs --lexicon");
  if (config.streams.empty()) throw so::ValidationError("at least one --stream is required");
  const auto lexicon = so::EntityLexicon::load(config.lexicon);
  std::vector<std::string> warnings;
  const auto streams = so::load_streams(config, so::make_text_prep(config), warnings);
  so::MentionCounts counts;
  std::vector<std::string> ids;
  for (const auto& s : streams) {
    counts.merge(so::count_mentions(lexicon, s.docs));
    ids.push_back(s.id);
  }
  write_out(config.output / "mentions.tsv", so::render_mentions_tsv(lexicon, counts, ids));
  const auto shares = so::bias_report(counts);
  write_out(config.output / "bias.tsv", so::render_bias_tsv(shares));
  const auto md = so::render_bias_markdown(shares);
  write_out(config.output / "bias.md", md);
  std::cout << md;
  print_warnings(warnings);
  return 0;
}

struct ReportArgs {
  std::string cells;
  std::string format = "md";
};

int run_report(const ReportArgs& a) {
  std::ifstream in(a.cells);
  if (!in) throw so::ValidationError("cannot open " + a.cells);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto matrix = so::parse_overlap_cells(buf.str());
  if (!matrix.complete()) throw so::ValidationError(a.cells + ": overlap matrix is incomplete");
  std::cout << (a.format == "tsv" ? so::render_overlap_tsv(matrix) : so::render_overlap_markdown(matrix));
  return 0;
}

int run_full(const Common& c) {
  const auto config = build_config(c);
  const auto summary = so::run_pipeline(config);
  std::cout << so::render_overlap_markdown(summary.matrix);
  for (const auto& s : summary.streams) {
    std::cerr << fmt::format("{}: {} documents, {} malformed, {} seeds, {} clusters ({} before pruning)\n", s.id,
                             s.documents, s.malformed, s.detected_topics, s.clusters_after_pruning,
                             s.clusters_before_pruning);
  }
  print_warnings(summary.warnings);
  std::cerr << "reports in " << config.output.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed topic overlap between document streams"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a planted two-stream corpus and its ground truth");
  generate->add_option("--output", gen.output, "output directory")->capture_default_str();
  generate->add_option("--seed", gen.spec.rng_seed, "random seed")->capture_default_str();
  generate->add_option("--topics-a", gen.spec.n_topics_a, "topics in stream A")->capture_default_str();
  generate->add_option("--topics-b", gen.spec.n_topics_b, "topics in stream B")->capture_default_str();
  generate->add_option("--shared-fraction", gen.spec.shared_fraction, "share of the smaller topic set present in both")
      ->capture_default_str();
  generate->add_option("--docs-per-topic", gen.spec.docs_per_topic, "documents per topic")->capture_default_str();
  generate->add_option("--multiplier-a", gen.multiplier_a, "docs-per-topic factor for stream A, category=x");
  generate->add_option("--multiplier-b", gen.multiplier_b, "docs-per-topic factor for stream B, category=x");
  generate->add_option("--category-mix", gen.mix, "share of topics per category, category=x");
  generate->add_option("--vocab-size", gen.spec.vocab_size, "vocabulary size")->capture_default_str();
  generate->add_option("--terms-per-topic", gen.spec.terms_per_topic, "topic pool size")->capture_default_str();
  generate->add_option("--doc-length", gen.spec.doc_length, "tokens per document")->capture_default_str();
  generate->add_option("--topic-term-share", gen.spec.topic_term_share, "probability a token comes from the topic pool")
      ->capture_default_str();
  generate->add_option("--noise-fraction", gen.spec.noise_doc_fraction, "background-only documents per topic document")
      ->capture_default_str();
  generate->add_option("--label-fraction", gen.spec.label_fraction, "labeled share of stream A topic documents")
      ->capture_default_str();
  generate->add_option("--stream-a", gen.spec.stream_a, "id of the first stream")->capture_default_str();
  generate->add_option("--stream-b", gen.spec.stream_b, "id of the second stream")->capture_default_str();
  generate->add_option("--lexicon", gen.lexicon, "entity lexicon whose persons are injected")->check(CLI::ExistingFile);
  generate->add_option("--entity-rate-a", gen.entity_rate_a, "per-document mention probability in stream A");
  generate->add_option("--entity-rate-b", gen.entity_rate_b, "per-document mention probability in stream B");

  Common detect_opts;
  auto* detect = app.add_subcommand("detect", "detect topic seeds in each stream");
  add_common(detect, detect_opts, true);

  Common track_opts;
  auto* track = app.add_subcommand("track", "detect and track topics, writing stream profiles");
  add_common(track, track_opts, true);

  AlignArgs align_args;
  auto* align = app.add_subcommand("align", "align the topics of one profile to another");
  align->add_option("--src", align_args.src, "source profile")->required()->check(CLI::ExistingFile);
  align->add_option("--dst", align_args.dst, "destination profile")->required()->check(CLI::ExistingFile);
  align->add_option("--theta-align", align_args.theta_align, "cosine threshold")->capture_default_str();
  align->add_option("--sample-n", align_args.sample_n, "unaligned source topics to sample");
  align->add_option("--sample-seed", align_args.sample_seed, "sampling seed")->capture_default_str();
  align->add_option("--output", align_args.output, "output directory")->capture_default_str();

  OverlapArgs overlap_args;
  auto* overlap = app.add_subcommand("overlap", "directed overlap matrix of two or more profiles");
  overlap->add_option("--profile", overlap_args.profiles, "stream profile (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  overlap->add_option("--theta-align", overlap_args.theta_align, "cosine threshold")->capture_default_str();
  overlap->add_option("--output", overlap_args.output, "output directory")->capture_default_str();

  Common intensity_opts;
  IntensityArgs intensity_args;
  auto* intensity = app.add_subcommand("intensity", "category intensity of SM attention to TM topics");
  add_common(intensity, intensity_opts, false);
  intensity->add_option_function<std::string>(
      "--theta-align", [&](const std::string& v) { intensity_opts.flags.emplace_back("theta_align", v); },
      "cosine threshold");
  intensity->add_option("--tm-profile", intensity_args.tm_profile, "TM stream profile")
      ->required()
      ->check(CLI::ExistingFile);
  intensity->add_option("--sm-profile", intensity_args.sm_profile, "SM stream profile")
      ->required()
      ->check(CLI::ExistingFile);
  intensity->add_option("--top-n", intensity_args.top_n, "top-ranked topics per category")->capture_default_str();

  ClusterArgs cluster_args;
  auto* cluster = app.add_subcommand("cluster", "k-means over topics aligned in both directions");
  cluster->add_option("--profile", cluster_args.profiles, "the two stream profiles")
      ->required()
      ->expected(2)
      ->check(CLI::ExistingFile);
  cluster->add_option("--theta-align", cluster_args.theta_align, "cosine threshold")->capture_default_str();
  cluster->add_option("-k,--k", cluster_args.k, "number of clusters")->capture_default_str();
  cluster->add_option("--seed", cluster_args.seed, "initialisation seed")->capture_default_str();
  cluster->add_option("--max-iters", cluster_args.max_iters, "iteration cap")->capture_default_str();
  cluster->add_option("--output", cluster_args.output, "output directory")->capture_default_str();

  Common mentions_opts;
  auto* mentions = app.add_subcommand("mentions", "entity mention counts and origin bias");
  add_common(mentions, mentions_opts, false);
  mentions->add_option_function<std::string>(
      "--lexicon", [&](const std::string& v) { mentions_opts.flags.emplace_back("lexicon", v); },
      "entity lexicon (JSON lines)");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "render an overlap table from from/to/percent cells");
  report->add_option("--cells", report_args.cells, "cells file")->required()->check(CLI::ExistingFile);
  report->add_option("--format", report_args.format, "md or tsv")
      ->check(CLI::IsMember({"md", "tsv"}))
      ->capture_default_str();

  Common run_opts;
  auto* run = app.add_subcommand("run", "full pipeline over all configured streams");
  add_common(run, run_opts, true);
  auto run_flag = [&](const char* name, const char* key, const char* help) {
    run->add_option_function<std::string>(
        name, [&run_opts, key](const std::string& v) { run_opts.flags.emplace_back(key, v); }, help);
  };
  run_flag("--lexicon", "lexicon", "entity lexicon (JSON lines)");
  run_flag("--intensity-tm", "intensity_tm", "TM stream for the intensity report");
  run_flag("--intensity-sm", "intensity_sm", "SM stream for the intensity report");
  run_flag("--cluster-a", "cluster_a", "first stream for topical k-means");
  run_flag("--cluster-b", "cluster_b", "second stream for topical k-means");
  run_flag("--kmeans-k", "kmeans_k", "number of k-means clusters");
  run_flag("--kmeans-seed", "kmeans_seed", "k-means seed");
  run_flag("--sample-n", "sample_n", "unaligned topics to sample per stream pair");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const so::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*detect) return run_detect_track(detect_opts, false);
    if (*track) return run_detect_track(track_opts, true);
    if (*align) return run_align(align_args);
    if (*overlap) return run_overlap(overlap_args);
    if (*intensity) return run_intensity(intensity_opts, intensity_args);
    if (*cluster) return run_cluster(cluster_args);
    if (*mentions) return run_mentions(mentions_opts);
    if (*report) return run_report(report_args);
    if (*run) return run_full(run_opts);
  } catch (const so::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const so::OrderingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
