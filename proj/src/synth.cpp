#include "streamoverlap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "streamoverlap/error.hpp"
#include "streamoverlap/rng.hpp"

namespace streamoverlap {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cdf_[r] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

double multiplier(const std::map<Category, double>& m, Category c) {
  const auto it = m.find(c);
  return it == m.end() ? 1.0 : it->second;
}

// Largest-remainder apportionment of n items over the mix, in category order.
std::vector<Category> apportion(const std::map<Category, double>& mix, std::size_t n) {
  std::vector<std::pair<Category, double>> shares;
  for (const Category c : kAllCategories) {
    const auto it = mix.find(c);
    shares.emplace_back(c, it == mix.end() ? 0.0 : it->second * static_cast<double>(n));
  }
  std::vector<std::size_t> counts;
  std::size_t assigned = 0;
  for (const auto& [c, s] : shares) {
    counts.push_back(static_cast<std::size_t>(std::floor(s)));
    assigned += counts.back();
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return shares[x].second - std::floor(shares[x].second) > shares[y].second - std::floor(shares[y].second);
  });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % order.size()) {
    ++counts[order[i]];
    ++assigned;
  }
  std::vector<Category> out;
  for (std::size_t i = 0; i < shares.size(); ++i) out.insert(out.end(), counts[i], shares[i].first);
  return out;
}

struct Draft {
  std::int64_t timestamp;
  std::optional<std::size_t> topic;
  std::string text;
  std::optional<Category> label;
  std::vector<std::size_t> injected;  // entity indices
};

}  // namespace

std::size_t SynthSpec::shared_topics() const {
  return static_cast<std::size_t>(
      std::llround(shared_fraction * static_cast<double>(std::min(n_topics_a, n_topics_b))));
}

std::string synth_word(std::size_t index) {
  const std::size_t syllables = kConsonants.size() * kVowels.size();
  std::string word;
  for (int i = 0; i < 3; ++i) {
    const std::size_t s = index % syllables;
    index /= syllables;
    word.insert(word.begin(), kVowels[s % kVowels.size()]);
    word.insert(word.begin(), kConsonants[s / kVowels.size()]);
  }
  return word;
}

std::vector<std::string> validate(const SynthSpec& spec) {
  std::vector<std::string> errors;
  auto unit_interval = [&](const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) errors.push_back(fmt::format("{} must be in [0, 1], got {}", name, v));
  };
  unit_interval("shared_fraction", spec.shared_fraction);
  unit_interval("topic_term_share", spec.topic_term_share);
  unit_interval("noise_doc_fraction", spec.noise_doc_fraction);
  unit_interval("label_fraction", spec.label_fraction);
  if (spec.n_topics_a == 0 && spec.n_topics_b == 0) errors.push_back("n_topics_a and n_topics_b are both 0");
  if (spec.docs_per_topic == 0) errors.push_back("docs_per_topic must be >= 1");
  if (spec.terms_per_topic == 0) errors.push_back("terms_per_topic must be >= 1");
  if (spec.doc_length == 0) errors.push_back("doc_length must be >= 1");
  if (!(spec.zipf_exponent > 0.0)) errors.push_back("zipf_exponent must be > 0");
  if (spec.duration <= 0) errors.push_back("duration must be > 0");
  if (spec.start_time < 0) errors.push_back("start_time must be >= 0");
  if (spec.stream_a.empty() || spec.stream_b.empty() || spec.stream_a == spec.stream_b) {
    errors.push_back("stream ids must be non-empty and distinct");
  }
  const bool topics_ok = spec.shared_fraction >= 0.0 && spec.shared_fraction <= 1.0;
  if (topics_ok && spec.vocab_size <= spec.distinct_topics() * spec.terms_per_topic) {
    errors.push_back(fmt::format("vocab_size {} must exceed distinct topics x terms_per_topic = {}", spec.vocab_size,
                                 spec.distinct_topics() * spec.terms_per_topic));
  }
  double mix = 0.0;
  for (const auto& [c, f] : spec.category_mix) {
    if (!(f >= 0.0 && f <= 1.0)) errors.push_back(fmt::format("category_mix[{}] must be in [0, 1]", to_string(c)));
    mix += f;
  }
  if (std::abs(mix - 1.0) > 1e-9) errors.push_back(fmt::format("category_mix must sum to 1, got {}", mix));
  for (const auto* m : {&spec.multiplier_a, &spec.multiplier_b}) {
    for (const auto& [c, f] : *m) {
      if (!(f >= 0.0)) errors.push_back(fmt::format("multiplier for {} must be >= 0", to_string(c)));
    }
  }
  std::vector<Person> persons;
  for (const auto& e : spec.entities) {
    unit_interval("entity rate_a", e.rate_a);
    unit_interval("entity rate_b", e.rate_b);
    persons.push_back(e.person);
  }
  try {
    EntityLexicon lexicon(std::move(persons));
  } catch (const ValidationError& e) {
    errors.push_back(std::string("entities: ") + e.what());
  }
  return errors;
}

SynthCorpus generate(const SynthSpec& spec) {
  if (const auto errors = validate(spec); !errors.empty()) {
    std::string msg = "invalid synthetic corpus spec:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  Rng rng(spec.rng_seed);
  SynthCorpus out;
  auto& truth = out.truth;

  const std::size_t shared = spec.shared_topics();
  const std::size_t only_a = spec.n_topics_a - shared;
  const std::size_t topics = spec.distinct_topics();
  truth.shared = shared;
  truth.topics_a = spec.n_topics_a;
  truth.topics_b = spec.n_topics_b;

  auto categories = apportion(spec.category_mix, topics);
  for (std::size_t i = categories.size(); i > 1; --i) std::swap(categories[i - 1], categories[rng.below(i)]);
  for (std::size_t t = 0; t < topics; ++t) {
    GroundTruth::Topic topic;
    topic.id = t;
    topic.category = categories[t];
    topic.in_a = t < shared + only_a;
    topic.in_b = t < shared || t >= shared + only_a;
    truth.topics.push_back(topic);
  }

  const std::size_t pool_terms = topics * spec.terms_per_topic;
  const ZipfSampler background(spec.vocab_size - pool_terms, spec.zipf_exponent);

  auto make_tokens = [&](std::optional<std::size_t> topic) {
    std::vector<std::string> tokens;
    tokens.reserve(spec.doc_length);
    for (std::size_t i = 0; i < spec.doc_length; ++i) {
      if (!topic) {
        tokens.push_back(synth_word(pool_terms + rng.below(spec.vocab_size - pool_terms)));
      } else if (rng.chance(spec.topic_term_share)) {
        tokens.push_back(synth_word(*topic * spec.terms_per_topic + rng.below(spec.terms_per_topic)));
      } else {
        tokens.push_back(synth_word(pool_terms + background.draw(rng)));
      }
    }
    return tokens;
  };

  auto build_stream = [&](bool is_a) {
    const auto& mult = is_a ? spec.multiplier_a : spec.multiplier_b;
    const auto& stream_id = is_a ? spec.stream_a : spec.stream_b;
    std::vector<Draft> drafts;
    std::size_t topic_docs = 0;
    for (const auto& topic : truth.topics) {
      if (!(is_a ? topic.in_a : topic.in_b)) continue;
      const auto n = static_cast<std::size_t>(
          std::llround(static_cast<double>(spec.docs_per_topic) * multiplier(mult, topic.category)));
      for (std::size_t d = 0; d < n; ++d) drafts.push_back({0, topic.id, {}, {}, {}});
      topic_docs += n;
    }
    const auto noise = static_cast<std::size_t>(std::llround(spec.noise_doc_fraction * static_cast<double>(topic_docs)));
    for (std::size_t d = 0; d < noise; ++d) drafts.push_back({0, std::nullopt, {}, {}, {}});

    for (auto& draft : drafts) {
      draft.timestamp = spec.start_time + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.duration)));
      auto tokens = make_tokens(draft.topic);
      if (is_a && draft.topic && rng.chance(spec.label_fraction)) draft.label = truth.topics[*draft.topic].category;

      // Injected names go into distinct gaps so that two names are always
      // separated by at least one generated word.
      std::vector<std::pair<std::size_t, std::size_t>> inserts;  // (gap, entity)
      std::vector<std::size_t> picked;
      for (std::size_t e = 0; e < spec.entities.size(); ++e) {
        const double rate = is_a ? spec.entities[e].rate_a : spec.entities[e].rate_b;
        if (rate > 0.0 && rng.chance(rate)) picked.push_back(e);
      }
      if (!picked.empty()) {
        const auto gaps = sample_without_replacement(tokens.size() + 1, picked.size(), rng);
        for (std::size_t i = 0; i < gaps.size(); ++i) inserts.emplace_back(gaps[i], picked[i]);
      }
      std::sort(inserts.begin(), inserts.end());
      std::string text;
      std::size_t next = 0;
      for (std::size_t gap = 0; gap <= tokens.size(); ++gap) {
        while (next < inserts.size() && inserts[next].first == gap) {
          const auto& person = spec.entities[inserts[next].second].person;
          const auto& variant = person.variants[rng.below(person.variants.size())];
          text += (text.empty() ? "" : " ") + variant;
          draft.injected.push_back(inserts[next].second);
          ++next;
        }
        if (gap < tokens.size()) text += (text.empty() ? "" : " ") + tokens[gap];
      }
      draft.text = std::move(text);
    }

    std::stable_sort(drafts.begin(), drafts.end(),
                     [](const Draft& x, const Draft& y) { return x.timestamp < y.timestamp; });

    auto& counts = truth.mentions[stream_id];
    for (const auto& e : spec.entities) counts[e.person.canonical] = 0;
    std::vector<Document> docs;
    docs.reserve(drafts.size());
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      auto& d = drafts[i];
      Document doc;
      doc.id = fmt::format("{}-{:06d}", stream_id, i);
      doc.stream_id = stream_id;
      doc.timestamp = d.timestamp;
      doc.text = std::move(d.text);
      doc.category = d.label;
      truth.doc_topic[doc.id] = d.topic;
      for (const auto e : d.injected) ++counts[spec.entities[e].person.canonical];
      docs.push_back(std::move(doc));
    }
    return docs;
  };

  out.a = build_stream(true);
  out.b = build_stream(false);
  return out;
}

}  // namespace streamoverlap
