#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "kex/error.hpp"
#include "kex/priors.hpp"
#include "kex/textproc.hpp"

namespace kex {

enum class EdgeWeighting { Binary, Count };

struct GraphOptions {
  /// Co-occurrence window length l: positions p, q are linked when |p - q| < l.
  std::size_t window = 10;
  EdgeWeighting weighting = EdgeWeighting::Count;
  /// Keep stopword tokens as nodes.
  bool all_words = false;
};

/// Undirected co-occurrence graph over stems.
struct WordGraph {
  /// Node stems in order of first occurrence.
  std::vector<std::string> nodes;
  std::unordered_map<std::string, Eigen::Index> index;
  /// Symmetric weights with an empty diagonal.
  Eigen::SparseMatrix<double> adjacency;
  GraphOptions options;

  Eigen::Index size() const { return static_cast<Eigen::Index>(nodes.size()); }
  /// Weight of edge (a, b), zero if absent.
  double edge(std::string_view a, std::string_view b) const;
};

/// Throws UsageError when the window is shorter than 2.
WordGraph build_graph(const ProcessedDocument& doc, const GraphOptions& options);

/// One `stem_i<TAB>stem_j<TAB>weight` line per undirected edge (i < j).
void write_edge_list(std::ostream& out, const WordGraph& graph);

enum class PriorKind { Uniform, Position, Topical, Tfidf, Specificity };

struct PriorDistribution {
  Eigen::VectorXd probabilities;
  PriorKind kind = PriorKind::Uniform;
};

PriorDistribution uniform_prior(Eigen::Index n);

/// Mass of a node is the sum of 1/p over its 1-based token positions.
PriorDistribution position_prior(const ProcessedDocument& doc, const WordGraph& graph);

/// Normalizes per-node scores; negative or non-finite scores count as zero.
/// Equal scores and an all-zero vector both give the uniform distribution.
PriorDistribution prior_from_scores(const Eigen::VectorXd& scores, PriorKind kind);

/// tf-idf (kind Tfidf) or lexical specificity (kind Specificity) of each node.
/// Nodes whose score is undefined under `stats` get zero mass.
PriorDistribution stat_prior(const ProcessedDocument& doc, const WordGraph& graph,
                             const TermStats& stats, PriorKind kind);

/// Cosine between each node's topic distribution and the document's. Throws
/// DataError when the model has no entry for the document.
PriorDistribution topical_prior(const ProcessedDocument& doc, const WordGraph& graph,
                                const TopicModel& topics);

template <typename Scalar>
struct PageRankOptions {
  /// Teleport weight of the prior.
  Scalar lambda = Scalar(0.15);
  /// Stop once the L1 change of one iteration falls below this.
  Scalar tol = Scalar(1e-6);
  int max_iter = 100;
};

template <typename Scalar>
struct PageRankResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scores;
  int iterations = 0;
  bool converged = false;
};

/// Biased PageRank by power iteration:
///
///   p <- (1 - lambda) * (W^T p + d(p) * prior) + lambda * prior
///
/// where W is the row-normalized adjacency and d(p) the mass sitting on nodes
/// without edges. Starts from the uniform vector.
template <typename Scalar>
PageRankResult<Scalar> pagerank(const Eigen::SparseMatrix<Scalar>& adjacency,
                                const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& prior,
                                const PageRankOptions<Scalar>& opts = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = adjacency.rows();
  if (n == 0) throw UsageError("pagerank on an empty graph");
  if (adjacency.cols() != n) throw UsageError("pagerank needs a square adjacency matrix");
  if (prior.size() != n) throw UsageError("prior dimension does not match the graph");
  if (opts.lambda < Scalar(0) || opts.lambda > Scalar(1)) {
    throw UsageError("pagerank lambda must lie in [0, 1]");
  }

  const Vector degree = adjacency * Vector::Ones(n);
  Vector inv_degree(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv_degree(i) = degree(i) > Scalar(0) ? Scalar(1) / degree(i) : Scalar(0);
  }
  const Eigen::SparseMatrix<Scalar> adjacency_t = adjacency.transpose();

  PageRankResult<Scalar> result;
  Vector p = Vector::Constant(n, Scalar(1) / static_cast<Scalar>(n));
  Vector next(n);
  for (int it = 1; it <= opts.max_iter; ++it) {
    Scalar dangling(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (degree(i) <= Scalar(0)) dangling += p(i);
    }
    next = adjacency_t * p.cwiseProduct(inv_degree);
    next = (Scalar(1) - opts.lambda) * (next + dangling * prior) + opts.lambda * prior;
    const Scalar change = (next - p).cwiseAbs().sum();
    p.swap(next);
    result.iterations = it;
    if (change < opts.tol) {
      result.converged = true;
      break;
    }
  }
  const Scalar total = p.sum();
  if (total > Scalar(0)) p /= total;
  result.scores = std::move(p);
  return result;
}

PageRankResult<double> pagerank(const WordGraph& graph, const PriorDistribution& prior,
                                const PageRankOptions<double>& opts = {});

struct TopicCluster {
  /// Candidate keys in lexicographic order.
  std::vector<std::string> members;
  /// Member with the earliest first occurrence.
  std::string representative;
};

/// Jaccard similarity of two candidates' stem sets.
double stem_set_similarity(const CandidatePhrase& a, const CandidatePhrase& b);

/// Average-linkage agglomerative clustering on stem-set Jaccard similarity,
/// merging while the best pair reaches `threshold`. Ties go to the pair that
/// comes first in candidate key order. Clusters are returned in order of
/// their representative's first occurrence.
std::vector<TopicCluster> cluster_topics(std::span<const CandidatePhrase> candidates,
                                         double threshold);

/// PageRank with a uniform prior over the complete cluster graph, where the
/// edge between two clusters sums 1/|p - q| over the start positions of their
/// members' occurrences. One score per cluster, in input order.
std::vector<double> topic_graph_rank(std::span<const TopicCluster> clusters,
                                     const ProcessedDocument& doc,
                                     const PageRankOptions<double>& opts = {});

}  // namespace kex
