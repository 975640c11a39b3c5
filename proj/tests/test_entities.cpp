#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "streamoverlap/entities.hpp"
#include "streamoverlap/error.hpp"
#include "streamoverlap/report.hpp"
#include "streamoverlap/synth.hpp"

using namespace streamoverlap;

namespace {

Person person(std::string canonical, std::vector<std::string> variants, Origin origin = Origin::usa) {
  return {std::move(canonical), std::move(variants), origin, Role::musician};
}

std::vector<Document> docs(std::string stream, std::vector<std::string> texts) {
  std::vector<Document> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out.push_back({stream + std::to_string(i), stream, static_cast<std::int64_t>(i), texts[i], std::nullopt});
  }
  return out;
}

MentionCounts counts_of(std::string stream, std::uint64_t usa, std::uint64_t china) {
  MentionCounts c;
  c.origin_totals[stream][Origin::usa] = usa;
  c.origin_totals[stream][Origin::china] = china;
  return c;
}

}  // namespace

TEST_CASE("empty lexicon counts nothing") {
  const EntityLexicon lexicon;
  const auto c = count_mentions(lexicon, docs("S", {"taylor swift sings", "nothing"}));
  CHECK(c.per_stream.at("S").empty());
  CHECK(c.origin_totals.at("S").at(Origin::usa) == 0);
  CHECK(c.origin_totals.at("S").at(Origin::china) == 0);
}

TEST_CASE("single and longest-match mentions") {
  const EntityLexicon one({person("Taylor Swift", {"Taylor Swift"})});
  CHECK(count_mentions(one, docs("S", {"taylor swift released"})).per_stream.at("S").at("Taylor Swift") == 1);

  const EntityLexicon two({person("Taylor Swift", {"Taylor Swift"}), person("Swift", {"Swift"})});
  const auto c = count_mentions(two, docs("S", {"taylor swift swift"}));
  CHECK(c.per_stream.at("S").at("Taylor Swift") == 1);
  CHECK(c.per_stream.at("S").at("Swift") == 1);

  const auto tokens = segment_words("taylor swift swift");
  const auto spans = two.find_mentions(tokens);
  std::vector<oracle::Span> expected = oracle::mentions(tokens, std::vector<Person>(two.persons().begin(), two.persons().end()));
  REQUIRE(spans.size() == expected.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    CHECK(spans[i].first == expected[i].first);
    CHECK(spans[i].length == expected[i].length);
    CHECK(spans[i].person == expected[i].person);
  }
}

TEST_CASE("variants of one person and case-insensitive matching") {
  const EntityLexicon lexicon({person("Yao Ming", {"Yao Ming", "姚明", "YAO"}, Origin::china)});
  const auto c = count_mentions(lexicon, docs("S", {"Yao Ming and yao met 姚明 today", "yaoming"}));
  CHECK(c.per_stream.at("S").at("Yao Ming") == 3);
  CHECK(c.origin_totals.at("S").at(Origin::china) == 3);
}

TEST_CASE("longest match is chosen globally before leftmost") {
  // "aa bb" is leftmost, "bb cc dd" is longer and wins.
  const EntityLexicon lexicon({person("AB", {"aa bb"}), person("BCD", {"bb cc dd"})});
  const auto tokens = segment_words("aa bb cc dd");
  const auto spans = lexicon.find_mentions(tokens);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].first == 1);
  CHECK(spans[0].length == 3);
}

TEST_CASE("lexicon validation") {
  CHECK_THROWS_AS(EntityLexicon({person("A", {"x y"}), person("B", {"X  Y"})}), ValidationError);
  CHECK_THROWS_AS(EntityLexicon({person("A", {"x"}), person("A", {"y"})}), ValidationError);
  CHECK_THROWS_AS(EntityLexicon({person("A", {})}), ValidationError);
  CHECK_THROWS_AS(EntityLexicon({person("", {"x"})}), ValidationError);
  CHECK_THROWS_AS(EntityLexicon({person("A", {"!!"})}), ValidationError);
  CHECK_NOTHROW(EntityLexicon({person("A", {"x y", "X Y"})}));
}

TEST_CASE("lexicon loads from JSON lines") {
  const auto path = std::filesystem::temp_directory_path() / "streamoverlap-lexicon-test.jsonl";
  {
    std::ofstream out(path);
    out << R"({"canonical":"Taylor Swift","variants":["Taylor Swift","T-Swift"],"origin":"USA","role":"musician"})"
        << "\n\n"
        << R"({"canonical":"Yao Ming","variants":["Yao Ming"],"origin":"China","role":"athlete"})" << "\n";
  }
  const auto lexicon = EntityLexicon::load(path);
  REQUIRE(lexicon.persons().size() == 2);
  CHECK(lexicon.persons()[1].origin == Origin::china);
  CHECK(lexicon.persons()[1].role == Role::athlete);
  {
    std::ofstream out(path);
    out << R"({"canonical":"X","variants":["x"],"origin":"Mars","role":"actor"})" << "\n";
  }
  CHECK_THROWS_AS(EntityLexicon::load(path), ValidationError);
  std::filesystem::remove(path);
}

TEST_CASE("counting partitions and merging equals counting the whole") {
  const EntityLexicon lexicon({person("Ann Lee", {"Ann Lee", "Lee"}), person("Bo", {"Bo"}, Origin::china)});
  const auto all = docs("S", {"ann lee and bo", "lee lee", "bo bo ann", "nothing", "Ann Lee Bo"});
  MentionCounts merged;
  merged.merge(count_mentions(lexicon, std::span(all).subspan(0, 2)));
  merged.merge(count_mentions(lexicon, std::span(all).subspan(2)));
  const auto whole = count_mentions(lexicon, all);
  CHECK(merged.per_stream == whole.per_stream);
  CHECK(merged.origin_totals == whole.origin_totals);
  CHECK(whole.per_stream.at("S").at("Ann Lee") == 4);
  CHECK(whole.per_stream.at("S").at("Bo") == 4);
}

TEST_CASE("count_mentions equals the brute-force span oracle on generated corpora") {
  const std::vector<Person> persons{
      person("Taylor Swift", {"Taylor Swift", "Swift", "T Swift"}),
      person("Swift Boat", {"Swift Boat Crew"}),
      person("Yao Ming", {"Yao Ming", "Yao", "姚明"}, Origin::china),
      person("Ming Dynasty Band", {"Ming Dynasty"}, Origin::china),
      person("Lee", {"Lee", "Lee Jr"}),
  };
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    SynthSpec spec;
    spec.n_topics_a = 5;
    spec.n_topics_b = 5;
    spec.docs_per_topic = 4;
    spec.doc_length = 12;
    spec.rng_seed = seed;
    for (std::size_t i = 0; i < persons.size(); ++i) {
      spec.entities.push_back({persons[i], 0.1 + 0.1 * static_cast<double>(i % 3), 0.05 * static_cast<double>(i)});
    }
    const auto corpus = generate(spec);
    const EntityLexicon lexicon(persons);
    for (const auto* stream : {&corpus.a, &corpus.b}) {
      const auto counts = count_mentions(lexicon, *stream);
      std::vector<std::string> texts;
      for (const auto& d : *stream) texts.push_back(d.text);
      const auto id = stream->front().stream_id;
      const auto expected = oracle::count(texts, persons);
      CHECK(counts.per_stream.at(id) == expected);
      CHECK(corpus.truth.mentions.at(id) == expected);
    }
  }
}

TEST_CASE("bias report shares") {
  const auto r = bias_report(counts_of("W", 88, 12));
  REQUIRE(r.size() == 1);
  REQUIRE(r[0].percent.has_value());
  CHECK(r[0].percent->at(Origin::usa) == doctest::Approx(88.0));
  CHECK(r[0].percent->at(Origin::china) == doctest::Approx(12.0));
  CHECK(render_bias_markdown(r) == "| stream | USA | China |\n|---|---|---|\n| W | 88% | 12% |\n");

  const auto equal = bias_report(counts_of("E", 5, 5));
  CHECK(equal[0].percent->at(Origin::usa) == 50.0);
  const auto single = bias_report(counts_of("S", 9, 0));
  CHECK(single[0].percent->at(Origin::usa) == 100.0);
  CHECK(single[0].percent->at(Origin::china) == 0.0);

  const auto none = bias_report(counts_of("N", 0, 0));
  CHECK_FALSE(none[0].percent.has_value());
  CHECK(render_bias_tsv(none).find("undefined") != std::string::npos);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto b = bias_report(counts_of("R", rng() % 100000, 1 + rng() % 100000));
    CHECK(std::abs(b[0].percent->at(Origin::usa) + b[0].percent->at(Origin::china) - 100.0) <= 0.01);
  }
}
