#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "streamoverlap/detection.hpp"
#include "streamoverlap/error.hpp"
#include "streamoverlap/pipeline.hpp"
#include "streamoverlap/synth.hpp"
#include "streamoverlap/tracking.hpp"

using namespace streamoverlap;

namespace {

TermVector uniform(std::initializer_list<TermId> ids) {
  std::vector<TermWeight> e;
  for (const auto id : ids) e.push_back({id, 1.0});
  return TermVector(std::move(e));
}

TopicSeed seed_for(const std::vector<WeightedDocument>& docs, std::size_t pos) {
  return {docs[pos].id, pos, 1.0, docs[pos].vector};
}

TopicCluster cluster(std::uint32_t id, TermVector centroid) { return {id, std::move(centroid), {"m"}}; }

// Online tracking recomputed from scratch with brute-force similarity.
std::vector<std::vector<std::string>> reference_track(const std::vector<WeightedDocument>& docs,
                                                      const std::vector<TopicSeed>& seeds,
                                                      const TrackingParams& params) {
  std::map<std::size_t, std::size_t> seed_at;
  for (std::size_t s = 0; s < seeds.size(); ++s) seed_at[seeds[s].position] = s;
  std::vector<std::vector<TermVector>> members(seeds.size());
  std::vector<std::vector<std::string>> ids(seeds.size());
  std::vector<TermVector> centroids(seeds.size());
  std::vector<bool> active(seeds.size(), false);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (seed_at.count(i)) {
      const auto s = seed_at[i];
      active[s] = true;
      members[s].push_back(seeds[s].seed_vector);
      ids[s].push_back(seeds[s].doc_id);
      centroids[s] = seeds[s].seed_vector.truncated(params.k_centroid).normalized();
      continue;
    }
    double best = -1.0;
    std::size_t best_s = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      if (!active[s]) continue;
      const double c = oracle::cosine(docs[i].vector, centroids[s]);
      if (c > best) {
        best = c;
        best_s = s;
      }
    }
    if (best < params.theta_track || docs[i].vector.empty()) continue;
    members[best_s].push_back(docs[i].vector);
    ids[best_s].push_back(docs[i].id);
    centroids[best_s] = centroid_of(members[best_s], params.k_centroid);
  }
  return ids;
}

}  // namespace

TEST_CASE("init_clusters") {
  std::vector<WeightedDocument> docs{{"a", 0, uniform({1, 2})}, {"b", 1, uniform({3})}, {"c", 2, uniform({4})}};
  std::vector<TopicSeed> seeds{seed_for(docs, 0), seed_for(docs, 1), seed_for(docs, 2)};
  const auto clusters = init_clusters(seeds, 100);
  REQUIRE(clusters.size() == 3);
  for (std::uint32_t i = 0; i < 3; ++i) {
    CHECK(clusters[i].topic_id == i);
    CHECK(clusters[i].member_ids == std::vector<std::string>{seeds[i].doc_id});
    CHECK(std::abs(clusters[i].centroid.norm() - 1.0) <= 1e-9);
  }

  std::vector<TermWeight> wide;
  for (TermId t = 0; t < 150; ++t) wide.push_back({t, 1.0 + 0.01 * t});
  const TopicSeed big{"w", 0, 1.0, TermVector(wide)};
  const auto c = init_clusters(std::span<const TopicSeed>(&big, 1), 100);
  CHECK(c[0].centroid.size() == 100);
  CHECK(std::abs(c[0].centroid.norm() - 1.0) <= 1e-9);
}

TEST_CASE("assign picks the most similar cluster above the threshold") {
  const auto doc = uniform({0});
  std::vector<TopicCluster> clusters{cluster(0, TermVector({{0, 0.7}, {1, std::sqrt(1.0 - 0.49)}})),
                                     cluster(1, TermVector({{0, 0.9}, {2, std::sqrt(1.0 - 0.81)}}))};
  CHECK(cosine(doc, clusters[0].centroid) == doctest::Approx(0.7));
  CHECK(cosine(doc, clusters[1].centroid) == doctest::Approx(0.9));
  CHECK(assign(doc, clusters, 0.6) == 1U);
  CHECK(assign(doc, clusters, 0.95) == std::nullopt);

  std::vector<TopicCluster> same{cluster(0, uniform({0, 1}).normalized())};
  CHECK(assign(uniform({0, 1}), same, 0.6) == 0U);
  CHECK(assign(uniform({7}), same, 0.6) == std::nullopt);

  std::vector<TopicCluster> tie{cluster(5, uniform({0}).normalized()), cluster(2, uniform({0}).normalized())};
  CHECK(assign(doc, tie, 0.6) == 2U);
  CHECK(assign(doc, {}, 0.6) == std::nullopt);
}

TEST_CASE("centroid is the truncated normalized mean") {
  const auto single = centroid_of(std::vector<TermVector>{TermVector({{1, 3.0}, {2, 4.0}})}, 100);
  CHECK(single.weight(1) == doctest::Approx(0.6));
  CHECK(single.weight(2) == doctest::Approx(0.8));

  // a=0, b=1, c=2: mean a:1, b:0.5, c:0.5; k=2 keeps a and b.
  const std::vector<TermVector> members{uniform({0, 1}), uniform({0, 2})};
  const auto c = centroid_of(members, 2);
  REQUIRE(c.size() == 2);
  CHECK(c.weight(0) == doctest::Approx(1.0 / std::sqrt(1.25)));
  CHECK(c.weight(1) == doctest::Approx(0.5 / std::sqrt(1.25)));
  CHECK(c.weight(2) == 0.0);

  TopicCluster tc{0, {}, {"x", "y"}};
  update_centroid(tc, members, 2);
  CHECK(tc.centroid == c);
}

TEST_CASE("centroid contract over random update sequences") {
  std::mt19937_64 rng(11);
  for (int seq = 0; seq < 1000; ++seq) {
    const std::size_t k = 1 + rng() % 40;
    CentroidAccumulator acc;
    std::vector<TermVector> members;
    const int updates = 1 + static_cast<int>(rng() % 8);
    for (int u = 0; u < updates; ++u) {
      auto v = oracle::random_vector(rng, 200, 60);
      if (v.empty()) v = uniform({static_cast<TermId>(rng() % 200)});
      acc.add(v);
      members.push_back(v);
      const auto c = acc.centroid(k);
      CHECK(c.size() <= k);
      CHECK(std::abs(c.norm() - 1.0) <= 1e-9);
      CHECK(std::abs(oracle::norm(c) - 1.0) <= 1e-9);
    }
    CHECK(acc.centroid(k) == centroid_of(members, k));
  }
}

TEST_CASE("prune_singletons") {
  auto make = [](std::vector<std::size_t> counts) {
    std::vector<TopicCluster> out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      TopicCluster c;
      c.topic_id = static_cast<std::uint32_t>(i);
      c.member_ids.assign(counts[i], "m");
      out.push_back(c);
    }
    return out;
  };
  CHECK(prune_singletons(make({1, 1, 1})).empty());
  CHECK(prune_singletons(make({2, 3})).size() == 2);
  const auto mixed = prune_singletons(make({1, 3, 1, 2}));
  REQUIRE(mixed.size() == 2);
  CHECK(mixed[0].member_count() == 3);
  CHECK(mixed[1].member_count() == 2);
  CHECK(mixed[0].topic_id == 1);
  CHECK(mixed[1].topic_id == 3);
}

TEST_CASE("track on duplicate and disjoint streams") {
  std::vector<WeightedDocument> docs;
  for (int i = 0; i < 6; ++i) docs.push_back({"d" + std::to_string(i), i, uniform({static_cast<TermId>(i % 2)})});
  std::vector<TopicSeed> seeds{seed_for(docs, 0), seed_for(docs, 1)};
  const auto p = track("S", docs, seeds, {});
  CHECK(p.stream_id == "S");
  CHECK(p.clusters_before_pruning == 2);
  REQUIRE(p.clusters.size() == 2);
  CHECK(p.clusters[0].member_ids == std::vector<std::string>{"d0", "d2", "d4"});
  CHECK(p.clusters[1].member_ids == std::vector<std::string>{"d1", "d3", "d5"});

  std::vector<WeightedDocument> disjoint;
  std::vector<TopicSeed> all;
  for (TermId i = 0; i < 5; ++i) disjoint.push_back({"x" + std::to_string(i), 0, uniform({i})});
  for (std::size_t i = 0; i < 5; ++i) all.push_back(seed_for(disjoint, i));
  const auto q = track("S", disjoint, all, {});
  CHECK(q.clusters_before_pruning == 5);
  CHECK(q.clusters.empty());
}

TEST_CASE("a cluster only accepts documents after its seed") {
  std::vector<WeightedDocument> docs{{"early", 0, uniform({1})}, {"seed", 1, uniform({1})}, {"late", 2, uniform({1})}};
  std::vector<TopicSeed> seeds{seed_for(docs, 1)};
  const auto p = track("S", docs, seeds, {});
  REQUIRE(p.clusters.size() == 1);
  CHECK(p.clusters[0].member_ids == std::vector<std::string>{"seed", "late"});
}

TEST_CASE("track rejects foreign seeds and unordered streams") {
  std::vector<WeightedDocument> docs{{"a", 0, uniform({1})}, {"b", 1, uniform({2})}};
  std::vector<TopicSeed> foreign{{"zz", 0, 1.0, uniform({1})}};
  CHECK_THROWS_AS(track("S", docs, foreign, {}), ValidationError);
  std::vector<WeightedDocument> unordered{{"a", 3, uniform({1})}, {"b", 1, uniform({2})}};
  CHECK_THROWS_AS(track("S", unordered, {}, {}), OrderingError);
}

TEST_CASE("indexed tracking equals brute-force online tracking") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    // Documents drawn around a few prototypes so that assignments happen.
    std::vector<TermVector> protos;
    for (int p = 0; p < 6; ++p) protos.push_back(oracle::random_vector(rng, 80, 20));
    std::vector<WeightedDocument> docs;
    for (int i = 0; i < 80; ++i) {
      const auto& base = protos[rng() % protos.size()];
      std::vector<TermWeight> e(base.entries().begin(), base.entries().end());
      const auto noise = oracle::random_vector(rng, 80, 4);
      e.insert(e.end(), noise.entries().begin(), noise.entries().end());
      docs.push_back({"d" + std::to_string(i), i, TermVector(e)});
    }
    KTermTable table({3, 20, 18});
    const auto seeds = detect(docs, table, 0.5);
    const TrackingParams params{0.6, 1 + rng() % 30};
    const auto profile = track("S", docs, seeds, params);
    const auto expected = reference_track(docs, seeds, params);
    std::vector<std::vector<std::string>> got(seeds.size());
    for (const auto& c : profile.clusters) got[c.topic_id] = c.member_ids;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      if (expected[s].size() > 1) {
        CHECK(got[s] == expected[s]);
      } else {
        CHECK(got[s].empty());
      }
    }
  }
}

TEST_CASE("planted corpus: documents land in the cluster of their planted topic") {
  SynthSpec spec;
  const auto corpus = generate(spec);
  const TextPrep prep;
  std::vector<PreparedStream> streams{prepare_stream("A", corpus.a, prep), prepare_stream("B", corpus.b, prep)};
  const auto dict = build_dictionary(streams);
  const auto docs = weigh_stream(streams[0], dict);
  KTermTable table({});
  const auto seeds = detect(docs, table, 0.5);
  const auto profile = track("A", docs, seeds, {});

  std::size_t topic_docs = 0;
  for (const auto& d : corpus.a) topic_docs += corpus.truth.doc_topic.at(d.id).has_value();
  std::size_t correct = 0;
  for (const auto& c : profile.clusters) {
    std::map<std::size_t, std::size_t> votes;
    for (const auto& id : c.member_ids) {
      if (const auto t = corpus.truth.doc_topic.at(id)) ++votes[*t];
    }
    std::size_t best = 0;
    for (const auto& [t, n] : votes) best = std::max(best, n);
    correct += best;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(topic_docs) >= 0.9);
}
