#include "streamoverlap/entities.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "streamoverlap/error.hpp"
#include "streamoverlap/text.hpp"

namespace streamoverlap {

std::string_view to_string(Origin o) { return o == Origin::usa ? "USA" : "China"; }

std::string_view to_string(Role r) {
  switch (r) {
    case Role::musician:
      return "musician";
    case Role::actor:
      return "actor";
    case Role::athlete:
      return "athlete";
  }
  return "unknown";
}

std::optional<Origin> parse_origin(std::string_view s) {
  if (s == "USA") return Origin::usa;
  if (s == "China") return Origin::china;
  return std::nullopt;
}

std::optional<Role> parse_role(std::string_view s) {
  for (const Role r : {Role::musician, Role::actor, Role::athlete}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

EntityLexicon::EntityLexicon(std::vector<Person> persons) : persons_(std::move(persons)) {
  std::unordered_map<std::string, std::size_t> owner;
  std::set<std::string> canonicals;
  for (std::size_t p = 0; p < persons_.size(); ++p) {
    const auto& person = persons_[p];
    if (person.canonical.empty()) throw ValidationError("lexicon: person with empty canonical name");
    if (!canonicals.insert(person.canonical).second) {
      throw ValidationError("lexicon: duplicate canonical name '" + person.canonical + "'");
    }
    if (person.variants.empty()) throw ValidationError("lexicon: '" + person.canonical + "' has no variants");
    for (const auto& variant : person.variants) {
      const auto words = segment_words(variant);
      if (words.empty()) {
        throw ValidationError("lexicon: variant '" + variant + "' of '" + person.canonical + "' has no words");
      }
      std::string key;
      for (const auto& w : words) key += (key.empty() ? "" : " ") + w;
      const auto [it, inserted] = owner.emplace(key, p);
      if (!inserted) {
        if (it->second == p) continue;
        throw ValidationError("lexicon: variant '" + variant + "' claimed by both '" +
                              persons_[it->second].canonical + "' and '" + person.canonical + "'");
      }
      std::size_t node = 0;
      for (const auto& w : words) {
        const auto next = trie_[node].next.find(w);
        if (next != trie_[node].next.end()) {
          node = next->second;
        } else {
          trie_.emplace_back();
          trie_[node].next.emplace(w, trie_.size() - 1);
          node = trie_.size() - 1;
        }
      }
      trie_[node].person = p;
    }
  }
}

EntityLexicon EntityLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon " + path.string());
  std::vector<Person> persons;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto rec = nlohmann::json::parse(line);
      Person p;
      p.canonical = rec.at("canonical").get<std::string>();
      p.variants = rec.at("variants").get<std::vector<std::string>>();
      const auto origin = parse_origin(rec.at("origin").get<std::string>());
      if (!origin) throw ValidationError(where + ": origin must be USA or China");
      p.origin = *origin;
      const auto role = parse_role(rec.at("role").get<std::string>());
      if (!role) throw ValidationError(where + ": role must be musician, actor or athlete");
      p.role = *role;
      persons.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return EntityLexicon(std::move(persons));
}

std::vector<MentionSpan> EntityLexicon::find_mentions(std::span<const std::string> tokens) const {
  std::vector<MentionSpan> candidates;
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    std::size_t node = 0;
    for (std::size_t i = start; i < tokens.size(); ++i) {
      const auto next = trie_[node].next.find(tokens[i]);
      if (next == trie_[node].next.end()) break;
      node = next->second;
      if (trie_[node].person) candidates.push_back({start, i - start + 1, *trie_[node].person});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const MentionSpan& a, const MentionSpan& b) {
    return a.length != b.length ? a.length > b.length : a.first < b.first;
  });
  std::vector<char> used(tokens.size(), 0);
  std::vector<MentionSpan> chosen;
  for (const auto& c : candidates) {
    if (std::any_of(used.begin() + static_cast<std::ptrdiff_t>(c.first),
                    used.begin() + static_cast<std::ptrdiff_t>(c.first + c.length), [](char u) { return u; })) {
      continue;
    }
    std::fill_n(used.begin() + static_cast<std::ptrdiff_t>(c.first), c.length, 1);
    chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return chosen;
}

void MentionCounts::merge(const MentionCounts& other) {
  for (const auto& [stream, names] : other.per_stream) {
    auto& mine = per_stream[stream];
    for (const auto& [name, n] : names) mine[name] += n;
  }
  for (const auto& [stream, origins] : other.origin_totals) {
    auto& mine = origin_totals[stream];
    for (const auto& [origin, n] : origins) mine[origin] += n;
  }
}

MentionCounts count_mentions(const EntityLexicon& lexicon, std::span<const Document> docs) {
  MentionCounts counts;
  const auto persons = lexicon.persons();
  for (const auto& doc : docs) {
    const auto [slot, fresh] = counts.per_stream.try_emplace(doc.stream_id);
    auto& names = slot->second;
    auto& origins = counts.origin_totals[doc.stream_id];
    if (fresh) {
      for (const auto& p : persons) names[p.canonical] = 0;
      for (const Origin o : kAllOrigins) origins[o] = 0;
    }
    const auto tokens = segment_words(doc.text);
    for (const auto& m : lexicon.find_mentions(tokens)) {
      ++names[persons[m.person].canonical];
      ++origins[persons[m.person].origin];
    }
  }
  return counts;
}

std::vector<OriginShares> bias_report(const MentionCounts& counts) {
  std::vector<OriginShares> out;
  for (const auto& [stream, origins] : counts.origin_totals) {
    OriginShares row;
    row.stream_id = stream;
    std::uint64_t total = 0;
    for (const Origin o : kAllOrigins) {
      const auto it = origins.find(o);
      row.mentions[o] = it == origins.end() ? 0 : it->second;
      total += row.mentions[o];
    }
    if (total > 0) {
      std::map<Origin, double> pct;
      for (const Origin o : kAllOrigins) {
        pct[o] = 100.0 * static_cast<double>(row.mentions[o]) / static_cast<double>(total);
      }
      row.percent = std::move(pct);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace streamoverlap
