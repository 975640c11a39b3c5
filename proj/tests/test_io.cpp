#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "streamoverlap/error.hpp"
#include "streamoverlap/io.hpp"

using namespace streamoverlap;

namespace {

IngestResult ingest_text(const std::string& text, double max_frac = 0.01) {
  std::istringstream in(text);
  return ingest(in, "S", "test", max_frac);
}

std::string line(const std::string& id, std::int64_t ts, const std::string& text = "some words") {
  return R"({"id":")" + id + R"(","timestamp":)" + std::to_string(ts) + R"(,"text":")" + text + "\"}\n";
}

}  // namespace

TEST_CASE("empty input ingests to nothing with a warning") {
  const auto r = ingest_text("");
  CHECK(r.docs.empty());
  CHECK(r.report.records == 0);
  REQUIRE(r.report.warnings.size() == 1);
  CHECK(r.report.warnings[0].find("no documents") != std::string::npos);
  CHECK(ingest_text("\n  \n").docs.empty());
}

TEST_CASE("documents come out sorted by timestamp with the caller's stream id") {
  const auto r = ingest_text(line("c", 30) + line("a", 10) + "\n" + line("b", 20));
  REQUIRE(r.docs.size() == 3);
  CHECK(r.docs[0].id == "a");
  CHECK(r.docs[1].id == "b");
  CHECK(r.docs[2].id == "c");
  for (const auto& d : r.docs) CHECK(d.stream_id == "S");
  CHECK(r.report.warnings.empty());
}

TEST_CASE("ingest order equals a stable sort of the file order") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Document> docs;
    const std::size_t n = 1 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      docs.push_back({"d" + std::to_string(i), "S", static_cast<std::int64_t>(rng() % 5), "w" + std::to_string(i),
                      std::nullopt});
    }
    std::ostringstream out;
    write_documents(out, docs);
    const auto r = ingest_text(out.str());
    std::stable_sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    REQUIRE(r.docs.size() == docs.size());
    for (std::size_t i = 0; i < n; ++i) CHECK(r.docs[i].id == docs[i].id);
  }
}

TEST_CASE("documents survive a write and ingest round trip") {
  const std::vector<Document> docs{{"x1", "S", 5, "héllo \"quoted\"\nline", Category::financial},
                                   {"x2", "S", 7, "plain", std::nullopt}};
  std::ostringstream out;
  write_documents(out, docs);
  const auto r = ingest_text(out.str());
  REQUIRE(r.docs.size() == 2);
  CHECK(r.docs[0].text == docs[0].text);
  CHECK(r.docs[0].category == Category::financial);
  CHECK_FALSE(r.docs[1].category.has_value());
}

TEST_CASE("malformed lines are skipped up to the threshold") {
  std::string text;
  for (int i = 0; i < 99; ++i) text += line("d" + std::to_string(i), i);
  text += "{not json\n";
  const auto ok = ingest_text(text);
  CHECK(ok.docs.size() == 99);
  CHECK(ok.report.malformed_lines == std::vector<std::size_t>{100});
  CHECK(ok.report.warnings.size() == 1);

  text += R"({"id":"q","timestamp":-1,"text":"t"})" "\n";
  CHECK_THROWS_AS(ingest_text(text), ValidationError);
  CHECK(ingest_text(text, 0.05).docs.size() == 99);

  for (const char* bad : {R"({"id":"","timestamp":1,"text":"t"})", R"({"id":"a","timestamp":1.5,"text":"t"})",
                          R"({"id":"a","timestamp":1,"text":"   "})", R"({"id":"a","timestamp":1})",
                          R"({"id":"a","timestamp":1,"text":"t","category":"sports"})", R"([1,2])"}) {
    const auto r = ingest_text(std::string(bad) + "\n", 1.0);
    CHECK(r.docs.empty());
    CHECK(r.report.malformed_lines.size() == 1);
  }
}

TEST_CASE("duplicate ids are fatal") {
  CHECK_THROWS_AS(ingest_text(line("a", 1) + line("a", 2)), ValidationError);
}

TEST_CASE("profiles round-trip through a shared vocabulary") {
  Vocabulary vocab;
  StreamProfile p;
  p.stream_id = "weibo";
  p.params = {{"theta_new", "0.5"}, {"k_hash", "3"}, {"a_last", "x"}};
  p.clusters_before_pruning = 9;
  const auto t0 = vocab.intern("alpha");
  const auto t1 = vocab.intern("贝塔");
  p.clusters.push_back({3, TermVector({{t0, 0.6}, {t1, 0.8}}).normalized(), {"m1", "m2"}});
  p.clusters.push_back({8, TermVector({{t1, 1.0}}), {"m3", "m4", "m5"}});
  std::ostringstream out;
  write_profile(out, p, vocab);

  Vocabulary fresh;
  fresh.intern("other");
  std::istringstream in(out.str());
  const auto q = read_profile(in, fresh);
  CHECK(q.stream_id == p.stream_id);
  CHECK(q.params == p.params);
  CHECK(q.clusters_before_pruning == 9);
  REQUIRE(q.clusters.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(q.clusters[i].topic_id == p.clusters[i].topic_id);
    CHECK(q.clusters[i].member_ids == p.clusters[i].member_ids);
    const auto& a = p.clusters[i].centroid.entries();
    const auto& b = q.clusters[i].centroid.entries();
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(fresh.term(b[j].term) == vocab.term(a[j].term));
      CHECK(b[j].weight == a[j].weight);
    }
  }

  std::istringstream bad("{\"record\":\"cluster\",\"topic_id\":1,\"member_count\":0,\"members\":[],\"centroid\":[]}\n");
  CHECK_THROWS_AS(read_profile(bad, fresh), ValidationError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_profile(empty, fresh), ValidationError);
}

TEST_CASE("edges round-trip exactly") {
  const std::vector<AlignmentEdge> edges{{0, 4, 0.7071067811865476}, {2, 1, 1.0}, {9, 0, 0.65000000000000002}};
  std::ostringstream out;
  write_edges(out, edges);
  std::istringstream in(out.str());
  CHECK(read_edges(in) == edges);
  std::istringstream bad("{\"src_topic\":1}\n");
  CHECK_THROWS_AS(read_edges(bad), ValidationError);
}

TEST_CASE("seed records") {
  const std::vector<TopicSeed> seeds{{"d1", 0, 1.0, {}}, {"d9", 8, 0.25, {}}};
  std::ostringstream out;
  write_seeds(out, seeds);
  CHECK(out.str() == "{\"doc_id\":\"d1\",\"position\":0,\"novelty\":1.0}\n"
                     "{\"doc_id\":\"d9\",\"position\":8,\"novelty\":0.25}\n");
}
