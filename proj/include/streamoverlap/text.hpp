#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace streamoverlap {

using TermId = std::uint32_t;

// ---------------------------------------------------------------------------
// Tokenization
//
// Words are maximal runs of letters, digits, combining marks and '_'. A
// single '.', '\'' or U+2019 between two word characters stays inside the
// word ("U.S." -> "u.s", "don't" -> "don't"); ',' and ';' do the same
// between two digits ("1,000"). Everything else separates. Han, Hiragana
// and Katakana characters never join Latin words; a run of them is emitted
// as overlapping character bigrams by tokenize() and as single characters
// by segment_words(). Case folding covers ASCII, Latin-1, Latin Extended-A,
// Greek, Cyrillic and fullwidth Latin.
// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(std::string_view text);

// Same word boundaries as tokenize(), one token per CJK character.
std::vector<std::string> segment_words(std::string_view text);

// Lowercases a UTF-8 string with the tokenizer's case mapping.
std::string fold_case(std::string_view text);

std::size_t codepoint_count(std::string_view utf8);

using StopwordSet = std::unordered_set<std::string>;

// UTF-8, one term per line; '#' starts a comment. Terms are case-folded.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Stemming hook; empty means identity.
using Stemmer = std::function<std::string(std::string_view)>;

std::vector<std::string> preprocess(std::span<const std::string> tokens, const StopwordSet& stopwords,
                                    const Stemmer& stem = {});

// Bundles the preprocessing configuration shared by every stage.
struct TextPrep {
  StopwordSet stopwords;
  Stemmer stem;

  std::vector<std::string> terms(std::string_view text) const {
    const auto tokens = tokenize(text);
    return preprocess(tokens, stopwords, stem);
  }
};

// ---------------------------------------------------------------------------
// Vocabulary and document-frequency statistics
// ---------------------------------------------------------------------------

// Dense string <-> id interning, ids assigned from 0 in first-seen order.
class Vocabulary {
 public:
  TermId intern(std::string_view term);
  std::optional<TermId> find(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_.at(id); }
  std::size_t size() const noexcept { return terms_.size(); }

 private:
  std::unordered_map<std::string, TermId> ids_;
  std::vector<std::string> terms_;
};

class TermDictionary {
 public:
  // Counts one document: n_docs += 1 and df += 1 for each distinct term.
  // Throws std::logic_error once frozen.
  void update_statistics(std::span<const std::string> doc_terms);

  // Adds another dictionary's counts; terms new to this one are registered
  // in the other dictionary's id order.
  void merge(const TermDictionary& other);

  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }

  std::optional<TermId> find(std::string_view term) const { return vocab_.find(term); }
  const std::string& term(TermId id) const { return vocab_.term(id); }
  const Vocabulary& vocabulary() const noexcept { return vocab_; }

  std::size_t size() const noexcept { return df_.size(); }
  std::uint64_t df(TermId id) const { return df_.at(id); }
  std::uint64_t n_docs() const noexcept { return n_docs_; }

  // ln(n_docs / df)
  double idf(TermId id) const;

 private:
  Vocabulary vocab_;
  std::vector<std::uint64_t> df_;
  std::uint64_t n_docs_ = 0;
  bool frozen_ = false;
};

// ---------------------------------------------------------------------------
// Sparse weighted vectors
// ---------------------------------------------------------------------------

struct TermWeight {
  TermId term;
  double weight;

  friend bool operator==(const TermWeight&, const TermWeight&) = default;
};

// Entries sorted by ascending term id, strictly positive weights, cached norm.
class TermVector {
 public:
  TermVector() = default;

  // Accepts entries in any order. Duplicate ids are summed, zero weights
  // dropped. Negative or non-finite weights throw std::invalid_argument.
  explicit TermVector(std::vector<TermWeight> entries);

  std::span<const TermWeight> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  double norm() const noexcept { return norm_; }

  // 0 when absent.
  double weight(TermId term) const;

  TermVector scaled(double factor) const;
  TermVector normalized() const;

  // The `limit` highest-weighted entries; ties keep the lower term id.
  TermVector truncated(std::size_t limit) const;

  friend bool operator==(const TermVector& a, const TermVector& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<TermWeight> entries_;
  double norm_ = 0.0;
};

double dot(const TermVector& a, const TermVector& b);

// dot(a, b) / (|a| |b|); 0 when either side is empty.
double cosine(const TermVector& a, const TermVector& b);

// tf(t) * ln(n_docs / df(t)) with raw counts. Terms the dictionary has never
// seen are dropped, as are terms with df == n_docs.
TermVector weigh(const TermDictionary& dict, const std::map<std::string, std::uint32_t>& term_counts);
TermVector weigh(const TermDictionary& dict, std::span<const std::string> terms);

}  // namespace streamoverlap
