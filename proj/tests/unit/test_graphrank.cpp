#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "kex/graphrank.hpp"

using namespace kex;
using testing::word_doc;

namespace {

Eigen::SparseMatrix<double> dense_to_sparse(const Eigen::MatrixXd& m) { return m.sparseView(); }

GraphOptions opts(std::size_t window, EdgeWeighting w) {
  GraphOptions o;
  o.window = window;
  o.weighting = w;
  return o;
}

CandidatePhrase phrase(std::vector<std::string> stems, std::vector<Span> occ) {
  CandidatePhrase c;
  c.stems = std::move(stems);
  for (const auto& s : c.stems) c.key += (c.key.empty() ? "" : " ") + s;
  c.surface = c.key;
  c.occurrences = std::move(occ);
  return c;
}

}  // namespace

TEST_CASE("co-occurrence graph construction") {
  const auto d = word_doc("d", {"a", "b", "a"});
  const auto counted = build_graph(d, opts(2, EdgeWeighting::Count));
  CHECK(counted.nodes == std::vector<std::string>{"a", "b"});
  CHECK(counted.edge("a", "b") == 2.0);
  CHECK(counted.edge("b", "a") == 2.0);
  CHECK(counted.edge("a", "a") == 0.0);
  const auto binary = build_graph(d, opts(2, EdgeWeighting::Binary));
  CHECK(binary.edge("a", "b") == 1.0);

  const auto single = build_graph(word_doc("s", {"x"}), opts(2, EdgeWeighting::Count));
  CHECK(single.size() == 1);
  CHECK(single.adjacency.nonZeros() == 0);

  const auto empty = build_graph(ProcessedDocument{}, opts(2, EdgeWeighting::Count));
  CHECK(empty.size() == 0);
  CHECK_THROWS_AS(build_graph(d, opts(1, EdgeWeighting::Count)), UsageError);

  // Window 3 links positions two apart.
  const auto w3 = build_graph(word_doc("w", {"a", "b", "c"}), opts(3, EdgeWeighting::Count));
  CHECK(w3.edge("a", "c") == 1.0);
  CHECK(build_graph(word_doc("w", {"a", "b", "c"}), opts(2, EdgeWeighting::Count)).edge("a", "c") ==
        0.0);
}

TEST_CASE("stopwords are skipped but still occupy positions") {
  auto d = word_doc("d", {"a", "the", "b"});
  d.tokens[1].is_stopword = true;
  const auto g = build_graph(d, opts(3, EdgeWeighting::Count));
  CHECK(g.nodes == std::vector<std::string>{"a", "b"});
  CHECK(g.edge("a", "b") == 1.0);
  CHECK(build_graph(d, opts(2, EdgeWeighting::Count)).edge("a", "b") == 0.0);

  auto all = opts(2, EdgeWeighting::Count);
  all.all_words = true;
  const auto ga = build_graph(d, all);
  CHECK(ga.size() == 3);
  CHECK(ga.edge("a", "the") == 1.0);
}

TEST_CASE("edge list dump") {
  const auto g = build_graph(word_doc("d", {"a", "b", "a", "c"}), opts(2, EdgeWeighting::Count));
  std::ostringstream out;
  write_edge_list(out, g);
  CHECK(out.str() == "a\tb\t2\na\tc\t1\n");
}

TEST_CASE("pagerank fixtures") {
  SUBCASE("two nodes") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    const auto r = pagerank<double>(dense_to_sparse(a), Eigen::VectorXd::Constant(2, 0.5));
    CHECK(r.converged);
    CHECK(r.scores(0) == doctest::Approx(0.5));
    CHECK(r.scores(1) == doctest::Approx(0.5));
  }
  SUBCASE("three node chain") {
    Eigen::MatrixXd a(3, 3);
    a << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    const auto r = pagerank<double>(dense_to_sparse(a), Eigen::VectorXd::Constant(3, 1.0 / 3));
    CHECK(r.converged);
    CHECK(r.iterations <= 100);
    // Fixed point: p_a = 0.85 p_b / 2 + 0.05, p_b = 0.85 (p_a + p_c) + 0.05.
    CHECK(r.scores(0) == doctest::Approx(19.0 / 74.0).epsilon(1e-5));
    CHECK(r.scores(1) == doctest::Approx(36.0 / 74.0).epsilon(1e-5));
    CHECK(r.scores(2) == doctest::Approx(19.0 / 74.0).epsilon(1e-5));
    CHECK(r.scores.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("lambda one returns the prior") {
    Eigen::MatrixXd a(3, 3);
    a << 0, 2, 0, 2, 0, 1, 0, 1, 0;
    Eigen::VectorXd prior(3);
    prior << 0.5, 0.3, 0.2;
    PageRankOptions<double> o;
    o.lambda = 1.0;
    const auto r = pagerank<double>(dense_to_sparse(a), prior, o);
    CHECK((r.scores - prior).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("dangling nodes send their mass through the prior") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1;
    Eigen::VectorXd prior(3);
    prior << 0.2, 0.2, 0.6;
    const auto r = pagerank<double>(dense_to_sparse(a), prior);
    CHECK(r.converged);
    CHECK(r.scores.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // Isolated node: p = 0.85 * 0.6 * p + 0.15 * 0.6.
    CHECK(r.scores(2) == doctest::Approx(0.09 / 0.49).epsilon(1e-5));
  }
  SUBCASE("errors") {
    Eigen::SparseMatrix<double> empty(0, 0);
    CHECK_THROWS_AS(pagerank<double>(empty, Eigen::VectorXd()), UsageError);
    Eigen::SparseMatrix<double> two(2, 2);
    CHECK_THROWS_AS(pagerank<double>(two, Eigen::VectorXd::Constant(3, 1.0 / 3)), UsageError);
    PageRankOptions<double> o;
    o.lambda = 1.5;
    CHECK_THROWS_AS(pagerank<double>(two, Eigen::VectorXd::Constant(2, 0.5), o), UsageError);
  }
  SUBCASE("single precision") {
    Eigen::SparseMatrix<float> a(2, 2);
    a.insert(0, 1) = 1.0f;
    a.insert(1, 0) = 1.0f;
    const auto r = pagerank<float>(a, Eigen::VectorXf::Constant(2, 0.5f));
    CHECK(r.scores(0) == doctest::Approx(0.5));
  }
}

TEST_CASE("pagerank is invariant to scaling edge weights") {
  const auto d = word_doc("d", {"a", "b", "c", "a", "d", "b", "e", "a", "c"});
  auto g = build_graph(d, opts(3, EdgeWeighting::Count));
  const auto prior = position_prior(d, g);
  const auto base = pagerank(g, prior);
  g.adjacency *= 7.25;
  const auto scaled = pagerank(g, prior);
  CHECK((base.scores - scaled.scores).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(base.scores.minCoeff() > 0.0);
}

TEST_CASE("position prior") {
  const auto ab = word_doc("d", {"a", "b"});
  const auto p = position_prior(ab, build_graph(ab, {}));
  CHECK(p.kind == PriorKind::Position);
  CHECK(p.probabilities(0) == doctest::Approx(2.0 / 3.0));
  CHECK(p.probabilities(1) == doctest::Approx(1.0 / 3.0));

  const auto same = word_doc("d", {"a", "a", "a"});
  const auto ps = position_prior(same, build_graph(same, {}));
  REQUIRE(ps.probabilities.size() == 1);
  CHECK(ps.probabilities(0) == 1.0);

  const auto aba = word_doc("d", {"a", "b", "a"});
  const auto pa = position_prior(aba, build_graph(aba, {}));
  const double total = 1.0 + 0.5 + 1.0 / 3.0;
  CHECK(pa.probabilities(0) == doctest::Approx((1.0 + 1.0 / 3.0) / total));
}

TEST_CASE("score priors") {
  Eigen::VectorXd s(2);
  s << 2.0, 0.0;
  auto p = prior_from_scores(s, PriorKind::Tfidf);
  CHECK(p.probabilities(0) == 1.0);
  CHECK(p.probabilities(1) == 0.0);

  s << 3.0, 3.0;
  p = prior_from_scores(s, PriorKind::Tfidf);
  CHECK(p.probabilities(0) == 0.5);
  CHECK(p.probabilities(1) == 0.5);

  s << 0.0, 0.0;
  CHECK(prior_from_scores(s, PriorKind::Specificity).probabilities(1) == 0.5);

  s << -1.0, std::nan("");
  CHECK(prior_from_scores(s, PriorKind::Specificity).probabilities(0) == 0.5);

  Eigen::VectorXd three(3);
  three << 1.0, -4.0, 3.0;
  p = prior_from_scores(three, PriorKind::Tfidf);
  CHECK(p.probabilities(0) == 0.25);
  CHECK(p.probabilities(1) == 0.0);
}

TEST_CASE("statistical priors from term statistics") {
  std::vector<ProcessedDocument> docs{word_doc("d1", {"apple", "banana", "apple"}),
                                      word_doc("d2", {"banana", "cherry"})};
  const auto stats = fit_term_stats(docs);
  const auto g = build_graph(docs[0], {});
  const auto tfidf = stat_prior(docs[0], g, stats, PriorKind::Tfidf);
  CHECK(tfidf.probabilities(g.index.at("apple")) == 1.0);
  CHECK(tfidf.probabilities(g.index.at("banana")) == 0.0);

  const auto spec = stat_prior(docs[0], g, stats, PriorKind::Specificity);
  CHECK(spec.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.probabilities.minCoeff() >= 0.0);

  // Statistics from an unrelated corpus leave every score undefined.
  std::vector<ProcessedDocument> other{word_doc("o", {"zebra"})};
  const auto foreign = stat_prior(docs[0], g, fit_term_stats(other), PriorKind::Specificity);
  CHECK(foreign.probabilities(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(stat_prior(docs[0], g, stats, PriorKind::Position), UsageError);
}

TEST_CASE("topical prior") {
  const auto d = word_doc("doc", {"w1", "w2", "w3", "w4"});
  const auto g = build_graph(d, {});
  TopicModel m;
  m.params.num_topics = 2;
  m.vocabulary = {{"w1", 0}, {"w2", 1}, {"w3", 2}};
  m.word_topic.resize(3, 2);
  // Cosines to the document: w1 1, w2 0.5, w3 0.
  m.word_topic << 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0, 0.0, 1.0;
  m.doc_topic["doc"] = Eigen::Vector2d(1.0, 0.0);
  const auto p = topical_prior(d, g, m);
  CHECK(p.probabilities(g.index.at("w1")) == doctest::Approx(2.0 / 3.0));
  CHECK(p.probabilities(g.index.at("w2")) == doctest::Approx(1.0 / 3.0));
  CHECK(p.probabilities(g.index.at("w3")) == doctest::Approx(0.0));
  CHECK(p.probabilities(g.index.at("w4")) == 0.0);

  const auto missing = word_doc("nope", {"w1"});
  CHECK_THROWS_AS(topical_prior(missing, build_graph(missing, {}), m), DataError);
}

TEST_CASE("topic clustering") {
  const auto nn = phrase({"neural", "network"}, {{0, 2}});
  const auto nn2 = phrase({"network", "neural"}, {{5, 7}});
  const auto ab = phrase({"a", "b"}, {{10, 12}});
  const auto bc = phrase({"b", "c"}, {{3, 5}});
  const auto z = phrase({"z"}, {{8, 9}});

  CHECK(stem_set_similarity(nn, nn2) == 1.0);
  CHECK(stem_set_similarity(nn, z) == 0.0);
  CHECK(stem_set_similarity(ab, bc) == doctest::Approx(1.0 / 3.0));

  std::vector<CandidatePhrase> pair{ab, bc};
  CHECK(cluster_topics(pair, 1.0 / 3.0).size() == 1);
  CHECK(cluster_topics(pair, 0.34).size() == 2);

  std::vector<CandidatePhrase> cands{nn, nn2, z};
  const auto clusters = cluster_topics(cands, 0.25);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].representative == "neural network");
  CHECK(clusters[0].members.size() == 2);
  CHECK(clusters[1].members == std::vector<std::string>{"z"});

  std::vector<CandidatePhrase> merged{ab, bc};
  const auto m = cluster_topics(merged, 0.25);
  REQUIRE(m.size() == 1);
  CHECK(m[0].representative == "b c");  // earliest occurrence
  CHECK(m[0].members == std::vector<std::string>{"a b", "b c"});

  CHECK(cluster_topics({}, 0.25).empty());
  CHECK_THROWS_AS(cluster_topics(cands, 0.0), UsageError);
}

TEST_CASE("average linkage uses the mean pairwise similarity") {
  // {x y} and {x y z} merge first (2/3); w = {z q} then has similarities
  // 0 and 1/4 to them, average 1/8.
  const auto a = phrase({"x", "y"}, {{0, 2}});
  const auto b = phrase({"x", "y", "z"}, {{3, 6}});
  const auto c = phrase({"q", "z"}, {{7, 9}});
  std::vector<CandidatePhrase> cands{a, b, c};
  CHECK(cluster_topics(cands, 0.2).size() == 2);
  CHECK(cluster_topics(cands, 0.125).size() == 1);
}

TEST_CASE("topic graph ranking") {
  ProcessedDocument d = word_doc("d", {"p0", "p1", "p2", "p3", "p4", "p5"});
  std::vector<TopicCluster> two{{{"p0"}, "p0"}, {{"p1"}, "p1"}};
  const auto s2 = topic_graph_rank(two, d);
  REQUIRE(s2.size() == 2);
  CHECK(s2[0] == doctest::Approx(0.5));
  CHECK(s2[1] == doctest::Approx(0.5));

  std::vector<TopicCluster> one{{{"p3"}, "p3"}};
  CHECK(topic_graph_rank(one, d) == std::vector<double>{1.0});

  // p0, p2, p4: edges 1/2, 1/2 and 1/4, so the middle cluster wins.
  std::vector<TopicCluster> three{{{"p0"}, "p0"}, {{"p2"}, "p2"}, {{"p4"}, "p4"}};
  const auto s3 = topic_graph_rank(three, d);
  CHECK(s3[1] > s3[0]);
  CHECK(s3[0] == doctest::Approx(s3[2]));

  std::vector<TopicCluster> bad{{{"nope"}, "nope"}};
  CHECK_THROWS_AS(topic_graph_rank(bad, d), UsageError);
  CHECK_THROWS_AS(topic_graph_rank({}, d), UsageError);
}
