#include "streamoverlap/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

#include "streamoverlap/error.hpp"

namespace streamoverlap {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::string list_lines(const std::vector<std::size_t>& lines) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(lines.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) out += (i ? ", " : "") + std::to_string(lines[i]);
  if (lines.size() > shown) out += ", ...";
  return out;
}

std::optional<Document> parse_document(const std::string& line, std::string_view stream_id) {
  const auto rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) return std::nullopt;
  const auto id = rec.find("id");
  const auto ts = rec.find("timestamp");
  const auto text = rec.find("text");
  if (id == rec.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) return std::nullopt;
  if (ts == rec.end() || !ts->is_number_integer() || ts->get<std::int64_t>() < 0) return std::nullopt;
  if (text == rec.end() || !text->is_string() || blank(text->get_ref<const std::string&>())) return std::nullopt;
  Document doc;
  doc.id = id->get<std::string>();
  doc.stream_id = std::string(stream_id);
  doc.timestamp = ts->get<std::int64_t>();
  doc.text = text->get<std::string>();
  if (const auto cat = rec.find("category"); cat != rec.end() && !cat->is_null()) {
    if (!cat->is_string()) return std::nullopt;
    const auto parsed = parse_category(cat->get_ref<const std::string&>());
    if (!parsed) return std::nullopt;
    doc.category = parsed;
  }
  return doc;
}

}  // namespace

void write_documents(std::ostream& out, std::span<const Document> docs) {
  for (const auto& d : docs) {
    ordered_json rec;
    rec["id"] = d.id;
    rec["timestamp"] = d.timestamp;
    rec["text"] = d.text;
    if (d.category) rec["category"] = std::string(to_string(*d.category));
    out << rec.dump() << '\n';
  }
}

IngestResult ingest(std::istream& in, std::string_view stream_id, std::string_view source,
                    double max_malformed_fraction) {
  IngestResult result;
  auto& report = result.report;
  std::unordered_set<std::string> ids;
  std::vector<std::size_t> duplicate_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    ++report.records;
    auto doc = parse_document(line, stream_id);
    if (!doc) {
      report.malformed_lines.push_back(line_no);
      continue;
    }
    if (!ids.insert(doc->id).second) {
      duplicate_lines.push_back(line_no);
      continue;
    }
    result.docs.push_back(std::move(*doc));
  }
  const std::string where(source);
  if (!duplicate_lines.empty()) {
    throw ValidationError(where + ": duplicate document ids on lines " + list_lines(duplicate_lines));
  }
  if (report.records > 0 && static_cast<double>(report.malformed_lines.size()) >
                                max_malformed_fraction * static_cast<double>(report.records)) {
    throw ValidationError(where + ": " + std::to_string(report.malformed_lines.size()) + " of " +
                          std::to_string(report.records) + " lines malformed (lines " +
                          list_lines(report.malformed_lines) + ")");
  }
  if (!report.malformed_lines.empty()) {
    report.warnings.push_back(where + ": skipped " + std::to_string(report.malformed_lines.size()) +
                              " malformed lines (" + list_lines(report.malformed_lines) + ")");
  }
  if (result.docs.empty()) report.warnings.push_back(where + ": no documents");
  std::stable_sort(result.docs.begin(), result.docs.end(),
                   [](const Document& a, const Document& b) { return a.timestamp < b.timestamp; });
  return result;
}

IngestResult ingest(const std::filesystem::path& path, std::string_view stream_id, double max_malformed_fraction) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return ingest(in, stream_id, path.string(), max_malformed_fraction);
}

void write_profile(std::ostream& out, const StreamProfile& profile, const Vocabulary& vocab) {
  ordered_json header;
  header["record"] = "header";
  header["stream_id"] = profile.stream_id;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : profile.params) params[k] = v;
  header["params"] = params;
  header["clusters_before_pruning"] = profile.clusters_before_pruning;
  header["clusters"] = profile.clusters.size();
  out << header.dump() << '\n';
  for (const auto& c : profile.clusters) {
    ordered_json rec;
    rec["record"] = "cluster";
    rec["topic_id"] = c.topic_id;
    rec["member_count"] = c.member_count();
    rec["members"] = c.member_ids;
    ordered_json centroid = ordered_json::array();
    for (const auto& e : c.centroid.entries()) centroid.push_back(ordered_json::array({vocab.term(e.term), e.weight}));
    rec["centroid"] = std::move(centroid);
    out << rec.dump() << '\n';
  }
}

StreamProfile read_profile(std::istream& in, Vocabulary& vocab) {
  StreamProfile profile;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::unordered_set<std::uint32_t> topic_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const auto rec = json::parse(line);
      const auto kind = rec.at("record").get<std::string>();
      if (kind == "header") {
        if (have_header) throw ValidationError("second header record");
        have_header = true;
        profile.stream_id = rec.at("stream_id").get<std::string>();
        profile.clusters_before_pruning = rec.at("clusters_before_pruning").get<std::size_t>();
        // json objects iterate in key order; the ordered header keeps file order
        const auto params = ordered_json::parse(line).at("params");
        for (const auto& [k, v] : params.items()) profile.params.emplace_back(k, v.get<std::string>());
      } else if (kind == "cluster") {
        if (!have_header) throw ValidationError("cluster record before header");
        TopicCluster c;
        c.topic_id = rec.at("topic_id").get<std::uint32_t>();
        if (!topic_ids.insert(c.topic_id).second) throw ValidationError("duplicate topic_id");
        c.member_ids = rec.at("members").get<std::vector<std::string>>();
        if (c.member_ids.size() != rec.at("member_count").get<std::size_t>()) {
          throw ValidationError("member_count does not match members");
        }
        std::vector<TermWeight> entries;
        for (const auto& pair : rec.at("centroid")) {
          entries.push_back({vocab.intern(pair.at(0).get<std::string>()), pair.at(1).get<double>()});
        }
        c.centroid = TermVector(std::move(entries));
        profile.clusters.push_back(std::move(c));
      } else {
        throw ValidationError("unknown record type '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw ValidationError("profile line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("profile line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError("profile line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ValidationError("profile has no header record");
  return profile;
}

void write_edges(std::ostream& out, std::span<const AlignmentEdge> edges) {
  for (const auto& e : edges) {
    ordered_json rec;
    rec["src_topic"] = e.src_topic;
    rec["dst_topic"] = e.dst_topic;
    rec["similarity"] = e.similarity;
    out << rec.dump() << '\n';
  }
}

std::vector<AlignmentEdge> read_edges(std::istream& in) {
  std::vector<AlignmentEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const auto rec = json::parse(line);
      edges.push_back({rec.at("src_topic").get<std::uint32_t>(), rec.at("dst_topic").get<std::uint32_t>(),
                       rec.at("similarity").get<double>()});
    } catch (const json::exception& e) {
      throw ValidationError("edges line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return edges;
}

void write_seeds(std::ostream& out, std::span<const TopicSeed> seeds) {
  for (const auto& s : seeds) {
    ordered_json rec;
    rec["doc_id"] = s.doc_id;
    rec["position"] = s.position;
    rec["novelty"] = s.novelty;
    out << rec.dump() << '\n';
  }
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth, std::string_view stream_a,
                        std::string_view stream_b) {
  ordered_json summary;
  summary["record"] = "summary";
  summary["stream_a"] = stream_a;
  summary["stream_b"] = stream_b;
  summary["topics_a"] = truth.topics_a;
  summary["topics_b"] = truth.topics_b;
  summary["shared_topics"] = truth.shared;
  summary["overlap_a_to_b"] = truth.overlap_a_to_b();
  summary["overlap_b_to_a"] = truth.overlap_b_to_a();
  out << summary.dump() << '\n';
  for (const auto& t : truth.topics) {
    ordered_json rec;
    rec["record"] = "topic";
    rec["topic"] = t.id;
    rec["category"] = to_string(t.category);
    rec["in_a"] = t.in_a;
    rec["in_b"] = t.in_b;
    rec["shared"] = t.shared();
    out << rec.dump() << '\n';
  }
  for (const auto& [id, topic] : truth.doc_topic) {
    ordered_json rec;
    rec["record"] = "doc";
    rec["id"] = id;
    rec["topic"] = topic ? ordered_json(*topic) : ordered_json(nullptr);
    out << rec.dump() << '\n';
  }
  for (const auto& [stream, names] : truth.mentions) {
    for (const auto& [name, n] : names) {
      ordered_json rec;
      rec["record"] = "mention";
      rec["stream"] = stream;
      rec["canonical"] = name;
      rec["count"] = n;
      out << rec.dump() << '\n';
    }
  }
}

}  // namespace streamoverlap
