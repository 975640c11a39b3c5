#include "streamoverlap/report.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "streamoverlap/error.hpp"

namespace streamoverlap {

namespace {

constexpr std::string_view kDiagonal = "—";

std::string cell(const OverlapMatrix& m, std::size_t i, std::size_t j) {
  if (i == j) return std::string(kDiagonal);
  const auto v = m.at(i, j);
  return v ? format_percent(*v) : "n/a";
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string terms_text(const std::vector<std::pair<std::string, double>>& terms) {
  std::vector<std::string> parts;
  for (const auto& [t, w] : terms) parts.push_back(fmt::format("{}:{:.4f}", t, w));
  return join(parts, " ");
}

}  // namespace

std::string format_percent(double percent) {
  if (percent <= 0.0) return "0%";
  if (percent < 1.0) return "<1%";
  return fmt::format("{}%", std::llround(percent));
}

std::string render_overlap_tsv(const OverlapMatrix& m) {
  std::string out = "from\\to";
  for (const auto& id : m.stream_ids()) out += "\t" + id;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.stream_ids()[i];
    for (std::size_t j = 0; j < m.size(); ++j) out += "\t" + cell(m, i, j);
    out += "\n";
  }
  return out;
}

std::string render_overlap_markdown(const OverlapMatrix& m) {
  std::string out = "| from \\ to |";
  std::string rule = "|---|";
  for (const auto& id : m.stream_ids()) {
    out += " " + id + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += "| " + m.stream_ids()[i] + " |";
    for (std::size_t j = 0; j < m.size(); ++j) out += " " + cell(m, i, j) + " |";
    out += "\n";
  }
  return out;
}

OverlapMatrix parse_overlap_cells(const std::string& tsv) {
  struct Cell {
    std::string from, to;
    double value;
  };
  std::vector<Cell> cells;
  std::vector<std::string> ids;
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) return i;
    }
    ids.push_back(id);
    return ids.size() - 1;
  };
  std::istringstream in(tsv);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, '\t');) fields.push_back(f);
    if (fields.size() < 3) {
      throw ValidationError(fmt::format("cells line {}: expected at least 3 tab-separated fields", line_no));
    }
    if (cells.empty() && ids.empty() && fields[0] == "from" && fields[2] == "percent") continue;
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("cells line {}: '{}' is not a number", line_no, fields[2]));
    }
    index_of(fields[0]);
    index_of(fields[1]);
    cells.push_back({fields[0], fields[1], v});
  }
  OverlapMatrix m(ids);
  for (const auto& c : cells) {
    try {
      m.set(index_of(c.from), index_of(c.to), c.value);
    } catch (const std::exception& e) {
      throw ValidationError(fmt::format("cell {} -> {}: {}", c.from, c.to, e.what()));
    }
  }
  return m;
}

std::string render_intensity_tsv(std::span<const IntensityRow> rows) {
  std::string out = "category\tclassified_topics\tselected_topics\tshort_supply\tsm_messages\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", to_string(r.category), r.classified, r.selected,
                       r.short_supply ? "yes" : "no", r.sm_messages);
  }
  return out;
}

std::string render_intensity_markdown(std::span<const IntensityRow> rows) {
  std::string out = "| category | classified topics | selected topics | SM messages |\n|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += fmt::format("| {} | {} | {}{} | {} |\n", to_string(r.category), r.classified, r.selected,
                       r.short_supply ? " (fewer than requested)" : "", r.sm_messages);
  }
  return out;
}

std::string render_mentions_tsv(const EntityLexicon& lexicon, const MentionCounts& counts,
                                std::span<const std::string> stream_ids) {
  std::string out = "stream\tcanonical\torigin\trole\tmentions\n";
  for (const auto& id : stream_ids) {
    const auto it = counts.per_stream.find(id);
    for (const auto& p : lexicon.persons()) {
      std::uint64_t n = 0;
      if (it != counts.per_stream.end()) {
        if (const auto c = it->second.find(p.canonical); c != it->second.end()) n = c->second;
      }
      out += fmt::format("{}\t{}\t{}\t{}\t{}\n", id, p.canonical, to_string(p.origin), to_string(p.role), n);
    }
  }
  return out;
}

std::string render_bias_tsv(std::span<const OriginShares> shares) {
  std::string out = "stream\tusa_mentions\tchina_mentions\tusa_percent\tchina_percent\n";
  for (const auto& s : shares) {
    const auto usa = s.mentions.at(Origin::usa);
    const auto china = s.mentions.at(Origin::china);
    if (s.percent) {
      out += fmt::format("{}\t{}\t{}\t{:.2f}\t{:.2f}\n", s.stream_id, usa, china, s.percent->at(Origin::usa),
                         s.percent->at(Origin::china));
    } else {
      out += fmt::format("{}\t{}\t{}\tundefined\tundefined\n", s.stream_id, usa, china);
    }
  }
  return out;
}

std::string render_bias_markdown(std::span<const OriginShares> shares) {
  std::string out = "| stream | USA | China |\n|---|---|---|\n";
  for (const auto& s : shares) {
    if (s.percent) {
      out += fmt::format("| {} | {} | {} |\n", s.stream_id, format_percent(s.percent->at(Origin::usa)),
                         format_percent(s.percent->at(Origin::china)));
    } else {
      out += fmt::format("| {} | undefined (no mentions) | undefined (no mentions) |\n", s.stream_id);
    }
  }
  return out;
}

std::string render_kmeans_tsv(std::span<const KMeansReportCluster> clusters) {
  std::string out = "cluster\tsize\ttop_terms\tmembers\n";
  for (const auto& c : clusters) {
    out += fmt::format("{}\t{}\t{}\t{}\n", c.index, c.members.size(), terms_text(c.top_terms), join(c.members, " "));
  }
  return out;
}

std::string render_kmeans_markdown(std::span<const KMeansReportCluster> clusters) {
  std::string out = "| cluster | size | top terms |\n|---|---|---|\n";
  for (const auto& c : clusters) {
    std::vector<std::string> names;
    for (const auto& [t, w] : c.top_terms) names.push_back(t);
    out += fmt::format("| {} | {} | {} |\n", c.index, c.members.size(), join(names, ", "));
  }
  return out;
}

}  // namespace streamoverlap
