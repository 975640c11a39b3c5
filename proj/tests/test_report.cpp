#include <string>
#include <vector>

#include "doctest.h"
#include "streamoverlap/error.hpp"
#include "streamoverlap/report.hpp"

using namespace streamoverlap;

TEST_CASE("format_percent") {
  CHECK(format_percent(0.0) == "0%");
  CHECK(format_percent(0.4) == "<1%");
  CHECK(format_percent(0.999) == "<1%");
  CHECK(format_percent(1.0) == "1%");
  CHECK(format_percent(42.5) == "43%");
  CHECK(format_percent(98.4) == "98%");
  CHECK(format_percent(100.0) == "100%");
}

TEST_CASE("two-stream matrix layout") {
  OverlapMatrix m({"A", "B"});
  m.set(0, 1, 40.0);
  m.set(1, 0, 10.0);
  CHECK(render_overlap_tsv(m) == "from\\to\tA\tB\nA\t—\t40%\nB\t10%\t—\n");
  CHECK(render_overlap_markdown(m) == "| from \\ to | A | B |\n|---|---|---|\n| A | — | 40% |\n| B | 10% | — |\n");

  OverlapMatrix partial({"A", "B"});
  partial.set(0, 1, 5.0);
  CHECK(render_overlap_tsv(partial) == "from\\to\tA\tB\nA\t—\t5%\nB\tn/a\t—\n");
}

TEST_CASE("six-stream table from measured cells") {
  const std::vector<std::string> ids{"CHN TM", "RenRen", "Weibo", "Western TM", "Twitter", "Facebook"};
  // "<1%" cells are entered as 0.5.
  const double v[6][6] = {{-1, 68, 98, 43, 23, 9},   {11, -1, 16, 0.5, 0.5, 0.5}, {8, 6, -1, 4, 9, 3},
                          {42, 16, 38, -1, 99, 86},  {4, 0.5, 9, 8, -1, 7},       {1, 0.5, 3, 9, 14, -1}};
  std::string cells = "from\tto\tpercent\n# measured\n";
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i != j) cells += ids[i] + "\t" + ids[j] + "\t" + std::to_string(v[i][j]) + "\textra\n";
    }
  }
  const auto m = parse_overlap_cells(cells);
  CHECK(m.stream_ids() == ids);
  CHECK(m.complete());
  const std::string expected =
      "| from \\ to | CHN TM | RenRen | Weibo | Western TM | Twitter | Facebook |\n"
      "|---|---|---|---|---|---|---|\n"
      "| CHN TM | — | 68% | 98% | 43% | 23% | 9% |\n"
      "| RenRen | 11% | — | 16% | <1% | <1% | <1% |\n"
      "| Weibo | 8% | 6% | — | 4% | 9% | 3% |\n"
      "| Western TM | 42% | 16% | 38% | — | 99% | 86% |\n"
      "| Twitter | 4% | <1% | 9% | 8% | — | 7% |\n"
      "| Facebook | 1% | <1% | 3% | 9% | 14% | — |\n";
  CHECK(render_overlap_markdown(m) == expected);
}

TEST_CASE("malformed cell files") {
  CHECK_THROWS_AS(parse_overlap_cells("A\tB\n"), ValidationError);
  CHECK_THROWS_AS(parse_overlap_cells("A\tB\tlots\n"), ValidationError);
  CHECK_THROWS_AS(parse_overlap_cells("A\tA\t5\n"), ValidationError);
  CHECK_THROWS_AS(parse_overlap_cells("A\tB\t101\n"), ValidationError);
  CHECK(parse_overlap_cells("").size() == 0);
}

TEST_CASE("intensity render") {
  const std::vector<IntensityRow> rows{{Category::celebrity, 12, 10, false, 7000},
                                       {Category::financial, 3, 3, true, 40}};
  CHECK(render_intensity_tsv(rows) ==
        "category\tclassified_topics\tselected_topics\tshort_supply\tsm_messages\n"
        "celebrity\t12\t10\tno\t7000\n"
        "financial\t3\t3\tyes\t40\n");
  const auto md = render_intensity_markdown(rows);
  CHECK(md.find("| celebrity | 12 | 10 | 7000 |") != std::string::npos);
  CHECK(md.find("3 (fewer than requested)") != std::string::npos);
}

TEST_CASE("kmeans render") {
  const std::vector<KMeansReportCluster> clusters{{0, {"A:1", "B:4"}, {{"olymp", 0.75}, {"rio", 0.5}}},
                                                  {1, {"A:2"}, {}}};
  CHECK(render_kmeans_tsv(clusters) ==
        "cluster\tsize\ttop_terms\tmembers\n"
        "0\t2\tolymp:0.7500 rio:0.5000\tA:1 B:4\n"
        "1\t1\t\tA:2\n");
  CHECK(render_kmeans_markdown(clusters) == "| cluster | size | top terms |\n|---|---|---|\n| 0 | 2 | olymp, rio |\n"
                                             "| 1 | 1 |  |\n");
}

TEST_CASE("mentions render lists every person for every stream") {
  const EntityLexicon lexicon({{"Taylor Swift", {"Taylor Swift"}, Origin::usa, Role::musician},
                               {"Yao Ming", {"Yao Ming"}, Origin::china, Role::athlete}});
  MentionCounts counts;
  counts.per_stream["W"]["Taylor Swift"] = 5;
  const std::vector<std::string> ids{"W", "C"};
  CHECK(render_mentions_tsv(lexicon, counts, ids) ==
        "stream\tcanonical\torigin\trole\tmentions\n"
        "W\tTaylor Swift\tUSA\tmusician\t5\n"
        "W\tYao Ming\tChina\tathlete\t0\n"
        "C\tTaylor Swift\tUSA\tmusician\t0\n"
        "C\tYao Ming\tChina\tathlete\t0\n");
}
