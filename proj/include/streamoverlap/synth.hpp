#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "streamoverlap/document.hpp"
#include "streamoverlap/entities.hpp"

namespace streamoverlap {

struct EntityInjection {
  Person person;
  double rate_a = 0.0;  // probability that a stream A document mentions the person
  double rate_b = 0.0;
};

/// Parameters of a planted two-stream corpus.
///
/// Topics 0..S-1 are shared, where S = round(shared_fraction * min(n_a, n_b));
/// the remaining topics of each stream are exclusive to it. Every topic owns
/// a disjoint pool of terms_per_topic vocabulary words. A document draws
/// doc_length tokens, each from its topic pool with probability
/// topic_term_share and otherwise from a Zipf-distributed background over
/// the rest of the vocabulary. Noise documents belong to no topic and draw
/// uniformly from that background vocabulary.
struct SynthSpec {
  std::size_t n_topics_a = 100;
  std::size_t n_topics_b = 100;
  double shared_fraction = 0.4;
  std::size_t docs_per_topic = 20;
  std::map<Category, double> multiplier_a;  // docs per topic scale by category; absent means 1
  std::map<Category, double> multiplier_b;
  std::size_t vocab_size = 20000;
  std::size_t terms_per_topic = 10;
  std::size_t doc_length = 60;
  double topic_term_share = 0.7;
  double zipf_exponent = 4.0;
  double noise_doc_fraction = 0.05;  // extra background-only documents, relative to topic documents
  std::map<Category, double> category_mix = {{Category::celebrity, 0.25},
                                             {Category::political, 0.25},
                                             {Category::accidents_disasters, 0.25},
                                             {Category::financial, 0.25}};
  double label_fraction = 0.2;  // stream A topic documents carrying their category label
  std::vector<EntityInjection> entities;
  std::uint64_t rng_seed = 1;
  std::int64_t start_time = 1464739200;  // 2016-06-01T00:00:00Z
  std::int64_t duration = 76 * 86400;
  std::string stream_a = "A";
  std::string stream_b = "B";

  std::size_t shared_topics() const;
  std::size_t distinct_topics() const { return n_topics_a + n_topics_b - shared_topics(); }
};

// Violated constraints, one message per field; empty when valid.
std::vector<std::string> validate(const SynthSpec& spec);

struct GroundTruth {
  struct Topic {
    std::size_t id = 0;
    Category category = Category::celebrity;
    bool in_a = false;
    bool in_b = false;
    bool shared() const { return in_a && in_b; }
  };

  std::vector<Topic> topics;
  std::map<std::string, std::optional<std::size_t>> doc_topic;  // nullopt for background-only docs
  std::size_t topics_a = 0;
  std::size_t topics_b = 0;
  std::size_t shared = 0;
  // stream id -> canonical -> injected mentions
  std::map<std::string, std::map<std::string, std::uint64_t>> mentions;

  double overlap_a_to_b() const { return topics_a ? 100.0 * static_cast<double>(shared) / topics_a : 0.0; }
  double overlap_b_to_a() const { return topics_b ? 100.0 * static_cast<double>(shared) / topics_b : 0.0; }
};

struct SynthCorpus {
  std::vector<Document> a;  // timestamp-ordered
  std::vector<Document> b;
  GroundTruth truth;
};

// Deterministic in spec.rng_seed. Throws ValidationError listing every
// violated field.
SynthCorpus generate(const SynthSpec& spec);

// Vocabulary word for an index: three consonant-vowel syllables.
std::string synth_word(std::size_t index);

}  // namespace streamoverlap
