#include "streamoverlap/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "streamoverlap/error.hpp"

namespace streamoverlap {

namespace {

enum class CharClass { separator, word, cjk, mid_any, mid_numeric };

struct Decoded {
  char32_t cp;
  std::size_t begin;
  std::size_t end;
};

std::vector<Decoded> decode_utf8(std::string_view s) {
  std::vector<Decoded> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = 0xFFFD;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_cjk(char32_t cp) {
  return in(cp, 0x4E00, 0x9FFF) || in(cp, 0x3400, 0x4DBF) || in(cp, 0xF900, 0xFAFF) ||
         in(cp, 0x20000, 0x2FA1F) || in(cp, 0x3040, 0x309F) || in(cp, 0x30A0, 0x30FF);
}

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') || cp == '_') {
      return CharClass::word;
    }
    if (cp == '.' || cp == '\'') return CharClass::mid_any;
    if (cp == ',' || cp == ';') return CharClass::mid_numeric;
    return CharClass::separator;
  }
  if (cp == 0x2019) return CharClass::mid_any;
  if (is_cjk(cp)) return CharClass::cjk;
  if (in(cp, 0x80, 0xBF) || cp == 0xD7 || cp == 0xF7 || in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) ||
      in(cp, 0x2100, 0x2BFF) || in(cp, 0x3000, 0x303F) || in(cp, 0xFE30, 0xFE4F) || in(cp, 0xFF00, 0xFF0F) ||
      in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) || in(cp, 0x1F000, 0x1FAFF) ||
      cp == 0xFFFD || cp == 0xFEFF) {
    return CharClass::separator;
  }
  return CharClass::word;
}

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

char32_t lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 0x20 : cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  if (in(cp, 0xFF21, 0xFF3A)) return cp + 0x20;
  return cp;
}

struct Span {
  std::size_t first;  // index into decoded codepoints
  std::size_t last;   // exclusive
  bool cjk;
};

std::vector<Span> scan(const std::vector<Decoded>& cps) {
  std::vector<Span> spans;
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const CharClass c = classify(cps[i].cp);
    if (c == CharClass::cjk) {
      std::size_t j = i;
      while (j < n && classify(cps[j].cp) == CharClass::cjk) ++j;
      spans.push_back({i, j, true});
      i = j;
      continue;
    }
    if (c != CharClass::word) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n) {
      const CharClass cj = classify(cps[j].cp);
      if (cj == CharClass::word) {
        ++j;
        continue;
      }
      if (j + 1 < n && classify(cps[j + 1].cp) == CharClass::word) {
        if (cj == CharClass::mid_any) {
          j += 2;
          continue;
        }
        if (cj == CharClass::mid_numeric && is_digit(cps[j - 1].cp) && is_digit(cps[j + 1].cp)) {
          j += 2;
          continue;
        }
      }
      break;
    }
    spans.push_back({i, j, false});
    i = j;
  }
  return spans;
}

std::string lowered(const std::vector<Decoded>& cps, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t k = first; k < last; ++k) append_utf8(out, lower(cps[k].cp));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::vector<std::string> tokens;
  for (const Span& sp : scan(cps)) {
    if (!sp.cjk) {
      tokens.push_back(lowered(cps, sp.first, sp.last));
    } else if (sp.last - sp.first == 1) {
      tokens.push_back(lowered(cps, sp.first, sp.last));
    } else {
      for (std::size_t k = sp.first; k + 1 < sp.last; ++k) tokens.push_back(lowered(cps, k, k + 2));
    }
  }
  return tokens;
}

std::vector<std::string> segment_words(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::vector<std::string> tokens;
  for (const Span& sp : scan(cps)) {
    if (!sp.cjk) {
      tokens.push_back(lowered(cps, sp.first, sp.last));
    } else {
      for (std::size_t k = sp.first; k < sp.last; ++k) tokens.push_back(lowered(cps, k, k + 1));
    }
  }
  return tokens;
}

std::string fold_case(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::string out;
  out.reserve(text.size());
  for (const auto& d : cps) {
    if (d.cp == 0xFFFD) {
      out.append(text.substr(d.begin, d.end - d.begin));
    } else {
      append_utf8(out, lower(d.cp));
    }
  }
  return out;
}

std::size_t codepoint_count(std::string_view utf8) {
  return static_cast<std::size_t>(std::count_if(utf8.begin(), utf8.end(), [](char ch) {
    return (static_cast<unsigned char>(ch) & 0xC0) != 0x80;
  }));
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stopword file " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto term = trim(line);
    if (!term.empty()) words.insert(fold_case(term));
  }
  return words;
}

std::vector<std::string> preprocess(std::span<const std::string> tokens, const StopwordSet& stopwords,
                                    const Stemmer& stem) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (stopwords.contains(tok)) continue;
    if (codepoint_count(tok) < 2) continue;
    out.push_back(stem ? stem(tok) : tok);
  }
  return out;
}

TermId Vocabulary::intern(std::string_view term) {
  std::string key(term);
  if (const auto it = ids_.find(key); it != ids_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  ids_.emplace(key, id);
  terms_.push_back(std::move(key));
  return id;
}

std::optional<TermId> Vocabulary::find(std::string_view term) const {
  if (const auto it = ids_.find(std::string(term)); it != ids_.end()) return it->second;
  return std::nullopt;
}

void TermDictionary::update_statistics(std::span<const std::string> doc_terms) {
  if (frozen_) throw std::logic_error("TermDictionary is frozen");
  std::vector<TermId> ids;
  ids.reserve(doc_terms.size());
  for (const auto& t : doc_terms) {
    const TermId id = vocab_.intern(t);
    if (id == df_.size()) df_.push_back(0);
    ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const TermId id : ids) ++df_[id];
  ++n_docs_;
}

void TermDictionary::merge(const TermDictionary& other) {
  if (frozen_) throw std::logic_error("TermDictionary is frozen");
  for (TermId id = 0; id < other.size(); ++id) {
    const TermId mine = vocab_.intern(other.term(id));
    if (mine == df_.size()) df_.push_back(0);
    df_[mine] += other.df(id);
  }
  n_docs_ += other.n_docs();
}

double TermDictionary::idf(TermId id) const {
  return std::log(static_cast<double>(n_docs_) / static_cast<double>(df_.at(id)));
}

TermVector::TermVector(std::vector<TermWeight> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw std::invalid_argument("TermVector weights must be finite and non-negative");
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.term < b.term; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size();) {
    TermWeight acc = entries_[i];
    std::size_t j = i + 1;
    while (j < entries_.size() && entries_[j].term == acc.term) acc.weight += entries_[j++].weight;
    if (acc.weight > 0.0) entries_[out++] = acc;
    i = j;
  }
  entries_.resize(out);
  double sq = 0.0;
  for (const auto& e : entries_) sq += e.weight * e.weight;
  norm_ = std::sqrt(sq);
}

double TermVector::weight(TermId term) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), term,
                                   [](const TermWeight& e, TermId t) { return e.term < t; });
  return (it != entries_.end() && it->term == term) ? it->weight : 0.0;
}

TermVector TermVector::scaled(double factor) const {
  std::vector<TermWeight> out(entries_);
  for (auto& e : out) e.weight *= factor;
  return TermVector(std::move(out));
}

TermVector TermVector::normalized() const {
  if (empty()) return {};
  return scaled(1.0 / norm_);
}

TermVector TermVector::truncated(std::size_t limit) const {
  if (entries_.size() <= limit) return *this;
  std::vector<TermWeight> top(entries_);
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(limit), top.end(),
                    [](const TermWeight& a, const TermWeight& b) {
                      return a.weight != b.weight ? a.weight > b.weight : a.term < b.term;
                    });
  top.resize(limit);
  return TermVector(std::move(top));
}

double dot(const TermVector& a, const TermVector& b) {
  const auto ea = a.entries();
  const auto eb = b.entries();
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].term < eb[j].term) {
      ++i;
    } else if (eb[j].term < ea[i].term) {
      ++j;
    } else {
      sum += ea[i].weight * eb[j].weight;
      ++i;
      ++j;
    }
  }
  return sum;
}

double cosine(const TermVector& a, const TermVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  return dot(a, b) / (a.norm() * b.norm());
}

TermVector weigh(const TermDictionary& dict, const std::map<std::string, std::uint32_t>& term_counts) {
  if (dict.n_docs() == 0) throw std::invalid_argument("weigh: dictionary has no documents");
  std::vector<TermWeight> entries;
  entries.reserve(term_counts.size());
  for (const auto& [term, count] : term_counts) {
    const auto id = dict.find(term);
    if (!id || count == 0) continue;
    const double w = static_cast<double>(count) * dict.idf(*id);
    if (w > 0.0) entries.push_back({*id, w});
  }
  return TermVector(std::move(entries));
}

TermVector weigh(const TermDictionary& dict, std::span<const std::string> terms) {
  std::map<std::string, std::uint32_t> counts;
  for (const auto& t : terms) ++counts[t];
  return weigh(dict, counts);
}

}  // namespace streamoverlap
