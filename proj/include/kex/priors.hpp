#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include <Eigen/Core>

#include "kex/error.hpp"
#include "kex/textproc.hpp"

namespace kex {

/// Corpus-level term statistics over stems of non-stopword tokens.
struct TermStats {
  std::uint64_t doc_count = 0;
  /// M: total number of non-stopword tokens.
  std::uint64_t total_tokens = 0;
  std::unordered_map<std::string, std::uint64_t> df;
  /// F: summed in-document frequency.
  std::unordered_map<std::string, std::uint64_t> corpus_tf;

  std::uint64_t document_frequency(std::string_view stem) const;
  std::uint64_t corpus_frequency(std::string_view stem) const;

  /// Adds another corpus' statistics (associative, commutative).
  void merge(const TermStats& other);
};

/// Throws DataError on an empty corpus.
TermStats fit_term_stats(std::span<const ProcessedDocument> docs, unsigned jobs = 1);

/// tf(w|d) for every non-stopword stem of the document.
std::unordered_map<std::string, std::uint64_t> term_frequencies(const ProcessedDocument& doc);

/// tf(w|d) * log2(|D| / df(w)); zero when df(w) is zero.
double tfidf_score(std::string_view stem, const ProcessedDocument& doc, const TermStats& stats);
double tfidf_score(std::uint64_t tf, std::uint64_t df, std::uint64_t doc_count);

/// Natural log of P(X >= f) for X ~ Hypergeometric(population, successes, draws).
/// Requires f >= 1, f <= min(successes, draws), draws <= population and
/// successes <= population; throws DataError otherwise.
double log_hypergeometric_tail(std::uint64_t f, std::uint64_t population, std::uint64_t successes,
                               std::uint64_t draws);

/// Lexical specificity -log10 P(X >= f) with population M, successes F and
/// draws m_d. Non-negative.
double specificity(std::uint64_t f, std::uint64_t total_tokens, std::uint64_t corpus_tf,
                   std::uint64_t doc_length);

/// Specificity of `stem` in `doc`. Throws DataError when the document's counts
/// are inconsistent with the statistics (f > F, m_d > M) or f is zero.
double specificity_score(std::string_view stem, const ProcessedDocument& doc,
                         const TermStats& stats);

struct LdaParams {
  int num_topics = 50;
  /// Symmetric document-topic prior; negative means 50 / num_topics.
  double alpha = -1.0;
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 42;

  double resolved_alpha() const { return alpha < 0.0 ? 50.0 / num_topics : alpha; }
};

struct TopicModel {
  LdaParams params;
  /// Row order of word_topic.
  std::map<std::string, Eigen::Index> vocabulary;
  /// P(topic | word), one row per vocabulary stem.
  Eigen::MatrixXd word_topic;
  /// P(topic | document) from the final assignment counts.
  std::map<std::string, Eigen::VectorXd> doc_topic;

  int num_topics() const { return params.num_topics; }
  /// Zero-length vector for words outside the vocabulary.
  Eigen::VectorXd word_distribution(std::string_view stem) const;
};

/// Collapsed Gibbs sampling over non-stopword stems. Deterministic for a given
/// seed. Warns when the vocabulary is smaller than the topic count.
TopicModel fit_lda(std::span<const ProcessedDocument> docs, const LdaParams& params,
                   const WarningHandler& warn = stderr_warnings());

/// Dataset priors consumed by the statistical, hybrid and topical extractors.
struct CorpusPriors {
  std::optional<TermStats> stats;
  std::optional<TopicModel> topics;
};

}  // namespace kex
