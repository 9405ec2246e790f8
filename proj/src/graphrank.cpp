#include "kex/graphrank.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <ostream>
#include <set>

namespace kex {

double WordGraph::edge(std::string_view a, std::string_view b) const {
  auto ia = index.find(std::string(a));
  auto ib = index.find(std::string(b));
  if (ia == index.end() || ib == index.end()) return 0.0;
  return adjacency.coeff(ia->second, ib->second);
}

WordGraph build_graph(const ProcessedDocument& doc, const GraphOptions& options) {
  if (options.window < 2) throw UsageError("co-occurrence window must be at least 2");
  WordGraph g;
  g.options = options;

  // Node id per token, -1 for tokens that are not nodes.
  std::vector<Eigen::Index> node_of(doc.tokens.size(), -1);
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    if (t.is_stopword && !options.all_words) continue;
    auto [it, inserted] = g.index.emplace(t.stem, g.size());
    if (inserted) g.nodes.push_back(t.stem);
    node_of[i] = it->second;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t p = 0; p < node_of.size(); ++p) {
    if (node_of[p] < 0) continue;
    const std::size_t stop = std::min(node_of.size(), p + options.window);
    for (std::size_t q = p + 1; q < stop; ++q) {
      if (node_of[q] < 0 || node_of[q] == node_of[p]) continue;
      triplets.emplace_back(node_of[p], node_of[q], 1.0);
      triplets.emplace_back(node_of[q], node_of[p], 1.0);
    }
  }
  g.adjacency.resize(g.size(), g.size());
  g.adjacency.setFromTriplets(triplets.begin(), triplets.end());
  if (options.weighting == EdgeWeighting::Binary) {
    for (Eigen::Index k = 0; k < g.adjacency.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(g.adjacency, k); it; ++it) {
        it.valueRef() = 1.0;
      }
    }
  }
  g.adjacency.makeCompressed();
  return g;
}

void write_edge_list(std::ostream& out, const WordGraph& graph) {
  // Column-major storage: iterate columns j, rows i < j, then sort for output.
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> edges;
  for (Eigen::Index j = 0; j < graph.adjacency.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(graph.adjacency, j); it; ++it) {
      if (it.row() < j) edges.emplace_back(it.row(), j, it.value());
    }
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [i, j, w] : edges) {
    out << graph.nodes[static_cast<std::size_t>(i)] << '\t'
        << graph.nodes[static_cast<std::size_t>(j)] << '\t' << w << '\n';
  }
}

PriorDistribution uniform_prior(Eigen::Index n) {
  if (n <= 0) throw UsageError("prior over an empty node set");
  return {Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), PriorKind::Uniform};
}

PriorDistribution position_prior(const ProcessedDocument& doc, const WordGraph& graph) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(graph.size());
  for (const Token& t : doc.tokens) {
    auto it = graph.index.find(t.stem);
    if (it == graph.index.end()) continue;
    if (t.is_stopword && !graph.options.all_words) continue;
    mass(it->second) += 1.0 / static_cast<double>(t.position + 1);
  }
  PriorDistribution prior = prior_from_scores(mass, PriorKind::Position);
  return prior;
}

PriorDistribution prior_from_scores(const Eigen::VectorXd& scores, PriorKind kind) {
  const Eigen::Index n = scores.size();
  if (n == 0) throw UsageError("prior over an empty node set");
  Eigen::VectorXd s = scores.unaryExpr([](double v) { return std::isfinite(v) && v > 0.0 ? v : 0.0; });
  const double total = s.sum();
  const bool all_equal = (s.array() == s(0)).all();
  if (total <= 0.0 || all_equal) {
    PriorDistribution u = uniform_prior(n);
    u.kind = kind;
    return u;
  }
  return {s / total, kind};
}

PriorDistribution stat_prior(const ProcessedDocument& doc, const WordGraph& graph,
                             const TermStats& stats, PriorKind kind) {
  if (kind != PriorKind::Tfidf && kind != PriorKind::Specificity) {
    throw UsageError("stat_prior expects a tfidf or specificity kind");
  }
  const auto tf = term_frequencies(doc);
  const std::uint64_t m_d = doc.content_length();
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(graph.size());
  for (Eigen::Index i = 0; i < graph.size(); ++i) {
    const std::string& stem = graph.nodes[static_cast<std::size_t>(i)];
    auto it = tf.find(stem);
    if (it == tf.end()) continue;  // stopword node: no statistics
    if (kind == PriorKind::Tfidf) {
      scores(i) = tfidf_score(it->second, stats.document_frequency(stem), stats.doc_count);
    } else {
      try {
        scores(i) = specificity(it->second, stats.total_tokens, stats.corpus_frequency(stem), m_d);
      } catch (const DataError&) {
        scores(i) = 0.0;  // undefined under these statistics
      }
    }
  }
  return prior_from_scores(scores, kind);
}

PriorDistribution topical_prior(const ProcessedDocument& doc, const WordGraph& graph,
                                const TopicModel& topics) {
  auto dt = topics.doc_topic.find(doc.id);
  if (dt == topics.doc_topic.end()) {
    throw DataError("topic model has no distribution for document '" + doc.id + "'");
  }
  const Eigen::VectorXd& theta = dt->second;
  const double theta_norm = theta.norm();
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(graph.size());
  if (theta_norm > 0.0) {
    for (Eigen::Index i = 0; i < graph.size(); ++i) {
      auto w = topics.vocabulary.find(graph.nodes[static_cast<std::size_t>(i)]);
      if (w == topics.vocabulary.end()) continue;
      const auto row = topics.word_topic.row(w->second);
      const double norm = row.norm();
      if (norm > 0.0) scores(i) = row.dot(theta.transpose()) / (norm * theta_norm);
    }
  }
  return prior_from_scores(scores, PriorKind::Topical);
}

PageRankResult<double> pagerank(const WordGraph& graph, const PriorDistribution& prior,
                                const PageRankOptions<double>& opts) {
  return pagerank<double>(graph.adjacency, prior.probabilities, opts);
}

double stem_set_similarity(const CandidatePhrase& a, const CandidatePhrase& b) {
  const std::set<std::string> sa(a.stems.begin(), a.stems.end());
  const std::set<std::string> sb(b.stems.begin(), b.stems.end());
  std::size_t common = 0;
  for (const auto& s : sa) common += sb.count(s);
  const std::size_t uni = sa.size() + sb.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<TopicCluster> cluster_topics(std::span<const CandidatePhrase> candidates,
                                         double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw UsageError("clustering threshold must lie in (0, 1]");
  }
  const auto n = static_cast<Eigen::Index>(candidates.size());
  if (n == 0) return {};

  // Work in candidate key order so ties resolve deterministically.
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return candidates[a].key < candidates[b].key; });

  Eigen::MatrixXd sim(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sim(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sim(i, j) = sim(j, i) = stem_set_similarity(candidates[order[static_cast<std::size_t>(i)]],
                                                  candidates[order[static_cast<std::size_t>(j)]]);
    }
  }

  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};
  std::vector<Eigen::Index> active(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) active[static_cast<std::size_t>(i)] = i;

  for (;;) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double s = sim(active[a], active[b]);
        if (s > best) {
          best = s;
          bi = a;
          bj = b;
        }
      }
    }
    if (active.size() < 2 || best < threshold) break;

    // Average linkage via the Lance-Williams update.
    const Eigen::Index i = active[bi];
    const Eigen::Index j = active[bj];
    const auto ni = static_cast<double>(members[static_cast<std::size_t>(i)].size());
    const auto nj = static_cast<double>(members[static_cast<std::size_t>(j)].size());
    for (Eigen::Index k : active) {
      if (k == i || k == j) continue;
      sim(i, k) = sim(k, i) = (ni * sim(i, k) + nj * sim(j, k)) / (ni + nj);
    }
    auto& mi = members[static_cast<std::size_t>(i)];
    const auto& mj = members[static_cast<std::size_t>(j)];
    mi.insert(mi.end(), mj.begin(), mj.end());
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  std::vector<TopicCluster> clusters;
  clusters.reserve(active.size());
  std::vector<std::size_t> first_pos;
  for (Eigen::Index c : active) {
    auto m = members[static_cast<std::size_t>(c)];
    std::sort(m.begin(), m.end());
    TopicCluster tc;
    std::size_t earliest = std::numeric_limits<std::size_t>::max();
    for (Eigen::Index idx : m) {
      const CandidatePhrase& cand = candidates[order[static_cast<std::size_t>(idx)]];
      tc.members.push_back(cand.key);
      if (cand.first_position() < earliest) {
        earliest = cand.first_position();
        tc.representative = cand.key;
      }
    }
    clusters.push_back(std::move(tc));
    first_pos.push_back(earliest);
  }
  std::vector<std::size_t> idx(clusters.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return first_pos[a] < first_pos[b];
  });
  std::vector<TopicCluster> sorted;
  sorted.reserve(clusters.size());
  for (std::size_t i : idx) sorted.push_back(std::move(clusters[i]));
  return sorted;
}

std::vector<double> topic_graph_rank(std::span<const TopicCluster> clusters,
                                     const ProcessedDocument& doc,
                                     const PageRankOptions<double>& opts) {
  if (clusters.empty()) throw UsageError("topic ranking needs at least one cluster");
  const auto n = static_cast<Eigen::Index>(clusters.size());
  std::vector<std::vector<std::size_t>> starts(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const auto& key : clusters[c].members) {
      const CandidatePhrase* cand = doc.find_candidate(key);
      if (!cand) throw UsageError("cluster member '" + key + "' is not a candidate of " + doc.id);
      for (const Span& s : cand->occurrences) starts[c].push_back(s.start);
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t a = 0; a < clusters.size(); ++a) {
    for (std::size_t b = a + 1; b < clusters.size(); ++b) {
      double w = 0.0;
      for (std::size_t p : starts[a]) {
        for (std::size_t q : starts[b]) {
          if (p != q) w += 1.0 / static_cast<double>(p > q ? p - q : q - p);
        }
      }
      if (w > 0.0) {
        triplets.emplace_back(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b), w);
        triplets.emplace_back(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a), w);
      }
    }
  }
  Eigen::SparseMatrix<double> adjacency(n, n);
  adjacency.setFromTriplets(triplets.begin(), triplets.end());
  const auto result = pagerank<double>(adjacency, uniform_prior(n).probabilities, opts);
  return {result.scores.begin(), result.scores.end()};
}

}  // namespace kex
