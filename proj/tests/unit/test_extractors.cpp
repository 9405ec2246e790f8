#include <doctest.h>

#include <set>

#include <json.hpp>

#include "fixtures.hpp"
#include "kex/corpus.hpp"
#include "kex/extractors.hpp"

using namespace kex;
using testing::word_doc;

namespace {

ScoredPhrase sp(std::string key, double score, std::size_t pos) {
  ScoredPhrase p;
  p.key = std::move(key);
  p.surface = p.key;
  p.score = score;
  p.first_position = pos;
  return p;
}

CandidatePhrase cand(std::vector<std::string> stems, std::size_t start) {
  CandidatePhrase c;
  c.stems = std::move(stems);
  for (const auto& s : c.stems) c.key += (c.key.empty() ? "" : " ") + s;
  c.surface = c.key;
  c.occurrences = {{start, start + c.stems.size()}};
  return c;
}

std::vector<std::string> keys(const std::vector<ScoredPhrase>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.key);
  return out;
}

struct MiniBench {
  std::vector<ProcessedDocument> docs;
  CorpusPriors priors;
};

const MiniBench& mini_bench() {
  static const MiniBench b = [] {
    MiniBench m;
    const auto ds = load_dataset(testing::fixture_dir() / "mini_benchmark", {});
    m.docs = process_dataset(testing::bundled_pipeline(), ds);
    m.priors.stats = fit_term_stats(m.docs);
    LdaParams p;
    p.num_topics = 4;
    p.iterations = 50;
    m.priors.topics = fit_lda(m.docs, p, {});
    return m;
  }();
  return b;
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (MethodId m : kAllMethods) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(parse_method("tfidfrank") == MethodId::TFIDFRank);
  CHECK(parse_method("LEXSPEC") == MethodId::LexSpec);
  CHECK_FALSE(parse_method("bm25"));
  CHECK(required_priors(MethodId::LexRank) == PriorNeed::TermStats);
  CHECK(required_priors(MethodId::SingleTPR) == PriorNeed::TopicModel);
  CHECK(required_priors(MethodId::TextRank) == PriorNeed::None);
  CHECK(required_priors(MethodId::TF) == PriorNeed::None);
}

TEST_CASE("word scores") {
  const auto d = word_doc("d1", {"a", "a", "b"});
  const auto tf = score_words(MethodId::TF, d, {});
  CHECK(tf.at("a") == 2.0);
  CHECK(tf.at("b") == 1.0);

  std::vector<ProcessedDocument> docs{word_doc("d1", {"apple", "banana", "apple"}),
                                      word_doc("d2", {"banana", "cherry"})};
  CorpusPriors priors;
  priors.stats = fit_term_stats(docs);
  CHECK(score_words(MethodId::TFIDF, docs[0], priors).at("apple") == doctest::Approx(2.0));
  CHECK(score_words(MethodId::LexSpec, docs[0], priors).at("apple") ==
        doctest::Approx(0.5228787452803376));

  const auto sym = score_words(MethodId::SingleRank, word_doc("s", {"a", "b"}), {});
  CHECK(sym.at("a") == doctest::Approx(0.5));
  CHECK(sym.at("b") == doctest::Approx(0.5));

  CHECK_THROWS_AS(score_words(MethodId::TFIDF, docs[0], {}), UsageError);
  CHECK_THROWS_AS(score_words(MethodId::LexRank, docs[0], {}), UsageError);
  CHECK_THROWS_AS(score_words(MethodId::SingleTPR, docs[0], {}), UsageError);
  CHECK_THROWS_AS(score_words(MethodId::FirstN, docs[0], {}), UsageError);
  CHECK(score_words(MethodId::TextRank, ProcessedDocument{}, {}).empty());
}

TEST_CASE("phrase aggregation averages stem scores") {
  std::vector<CandidatePhrase> cands{cand({"neural", "network"}, 0), cand({"neural"}, 3),
                                     cand({"a", "b"}, 5)};
  const WordScores scores{{"neural", 0.4}, {"network", 0.2}, {"a", 0.6}};
  const auto agg = aggregate_phrases(scores, cands);
  CHECK(agg[0].score == doctest::Approx(0.3));
  CHECK(agg[1].score == 0.4);
  CHECK(agg[2].score == doctest::Approx(0.3));
  CHECK(agg[2].first_position == 5);
}

TEST_CASE("top_n ordering and truncation") {
  CHECK(keys(top_n({sp("x", 0.9, 5), sp("y", 0.1, 0)}, 1)) == std::vector<std::string>{"x"});
  CHECK(keys(top_n({sp("y", 0.5, 7), sp("x", 0.5, 2)}, 2)) == std::vector<std::string>{"x", "y"});
  CHECK(keys(top_n({sp("long key", 0.5, 2), sp("short", 0.5, 2)}, 2)) ==
        std::vector<std::string>{"short", "long key"});
  CHECK(keys(top_n({sp("bb", 0.5, 2), sp("ab", 0.5, 2)}, 2)) ==
        std::vector<std::string>{"ab", "bb"});
  const auto all = top_n({sp("a", 0.2, 0), sp("b", 0.3, 1)}, 10);
  REQUIRE(all.size() == 2);
  CHECK(all[0].rank == 1);
  CHECK(all[1].rank == 2);
  CHECK_THROWS_AS(top_n({}, 0), UsageError);
}

TEST_CASE("FirstN") {
  ProcessedDocument d;
  d.candidates = {cand({"c"}, 3), cand({"a"}, 1), cand({"h"}, 8)};
  const auto two = extract_firstn(d, 2);
  CHECK(keys(two) == std::vector<std::string>{"a", "c"});
  CHECK(two[0].score == 1.0);
  CHECK(two[1].score == 0.5);
  CHECK(keys(extract_firstn(d, 1)) == std::vector<std::string>{"a"});
  CHECK(extract_firstn(ProcessedDocument{}, 5).empty());
}

TEST_CASE("TopicRank emits cluster representatives") {
  ProcessedDocument d = word_doc("d", {"neural", "network", "x", "y", "neural", "network", "z"});
  d.candidates = {cand({"neural", "network"}, 0), cand({"x"}, 2), cand({"network", "neural"}, 4),
                  cand({"z"}, 6)};
  d.candidates[2].key = "network neural";
  const auto r = extract_topicrank(d, 5);
  std::set<std::string> got;
  for (const auto& p : r) got.insert(p.key);
  CHECK(got == std::set<std::string>{"neural network", "x", "z"});
  CHECK(extract_topicrank(d, 2).size() == 2);
  CHECK(extract_topicrank(ProcessedDocument{}, 5).empty());
}

TEST_CASE("scaling word scores keeps the ranking") {
  const auto& b = mini_bench();
  for (const auto& d : b.docs) {
    auto scores = score_words(MethodId::TFIDF, d, b.priors);
    const auto base = top_n(aggregate_phrases(scores, d.candidates), kAllPhrases);
    for (auto& [w, v] : scores) v *= 3.5;
    const auto scaled = top_n(aggregate_phrases(scores, d.candidates), kAllPhrases);
    CHECK(keys(base) == keys(scaled));
  }
}

TEST_CASE("graph reductions") {
  const auto& b = mini_bench();
  for (const auto& d : b.docs) {
    const auto single = extract(MethodId::SingleRank, d, {}, kAllPhrases);
    for (MethodId m : {MethodId::TFIDFRank, MethodId::LexRank}) {
      const auto g = build_graph(d, method_graph_options(m, {}));
      const auto r = extract_with_prior(m, d, uniform_prior(g.size()), kAllPhrases);
      REQUIRE(r.size() == single.size());
      for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r[i].key == single[i].key);
        CHECK(r[i].score == single[i].score);
      }
    }
    ExtractionConfig cfg;
    cfg.windows[MethodId::SingleRank] = 2;
    cfg.weightings[MethodId::SingleRank] = EdgeWeighting::Binary;
    const auto reduced = extract(MethodId::SingleRank, d, {}, kAllPhrases, cfg);
    const auto textrank = extract(MethodId::TextRank, d, {}, kAllPhrases);
    CHECK(keys(reduced) == keys(textrank));
  }
}

TEST_CASE("every method is deterministic and predicts candidates") {
  const auto& b = mini_bench();
  for (MethodId m : kAllMethods) {
    for (const auto& d : b.docs) {
      const auto r1 = extract(m, d, b.priors, 10);
      const auto r2 = extract(m, d, b.priors, 10);
      CHECK(keys(r1) == keys(r2));
      CHECK_FALSE(r1.empty());
      for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].rank == i + 1);
        CHECK(r1[i].score >= 0.0);
        CHECK(d.find_candidate(r1[i].key) != nullptr);
        if (i > 0) CHECK(r1[i].score <= r1[i - 1].score);
      }
    }
  }
}

TEST_CASE("prediction JSON") {
  ScoredPhrase p = sp("neural network", 0.25, 0);
  p.surface = "Neural networks";
  p.stems = {"neural", "network"};
  p.rank = 1;
  const std::vector<ScoredPhrase> ps{p};
  const auto j = nlohmann::json::parse(prediction_json("doc-1", MethodId::LexRank, ps));
  CHECK(j["doc_id"] == "doc-1");
  CHECK(j["method"] == "LexRank");
  CHECK(j["phrases"][0]["surface"] == "Neural networks");
  CHECK(j["phrases"][0]["stems"][1] == "network");
  CHECK(j["phrases"][0]["score"] == 0.25);
  CHECK(j["phrases"][0]["rank"] == 1);
}
