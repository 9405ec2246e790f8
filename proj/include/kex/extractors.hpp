#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kex/graphrank.hpp"
#include "kex/priors.hpp"
#include "kex/textproc.hpp"

namespace kex {

enum class MethodId {
  FirstN,
  TF,
  TFIDF,
  LexSpec,
  TextRank,
  SingleRank,
  PositionRank,
  TopicRank,
  SingleTPR,
  TFIDFRank,
  LexRank,
};

inline constexpr std::array<MethodId, 11> kAllMethods{
    MethodId::FirstN,     MethodId::TF,           MethodId::TFIDF,     MethodId::LexSpec,
    MethodId::TextRank,   MethodId::SingleRank,   MethodId::PositionRank, MethodId::TopicRank,
    MethodId::SingleTPR,  MethodId::TFIDFRank,    MethodId::LexRank};

std::string_view to_string(MethodId m);
/// Case-insensitive.
std::optional<MethodId> parse_method(std::string_view name);

enum class PriorNeed { None, TermStats, TopicModel };
PriorNeed required_priors(MethodId m);

/// Methods that score words by PageRank over the co-occurrence graph.
bool is_word_graph_method(MethodId m);

struct ExtractionConfig {
  /// Co-occurrence window per method; methods not listed use `default_window`,
  /// TextRank uses `textrank_window`.
  std::map<MethodId, std::size_t> windows;
  std::size_t default_window = 10;
  std::size_t textrank_window = 2;
  /// Edge weighting overrides; by default TextRank is binary, the rest count.
  std::map<MethodId, EdgeWeighting> weightings;
  PageRankOptions<double> pagerank;
  double topic_threshold = 0.25;
  bool graph_all_words = false;

  std::size_t window(MethodId m) const;
  EdgeWeighting weighting(MethodId m) const;
};

/// Graph settings a word-graph method uses.
GraphOptions method_graph_options(MethodId m, const ExtractionConfig& cfg);

/// Teleport prior a word-graph method uses on `graph`. Throws UsageError when
/// the method needs priors that are missing.
PriorDistribution method_prior(MethodId m, const ProcessedDocument& doc, const WordGraph& graph,
                               const CorpusPriors& priors);

using WordScores = std::unordered_map<std::string, double>;

/// PageRank score per node stem.
WordScores graph_word_scores(const WordGraph& graph, const PriorDistribution& prior,
                             const PageRankOptions<double>& opts);

/// Per-stem importance for the word-level methods. FirstN and TopicRank rank
/// phrases directly and are rejected with UsageError.
WordScores score_words(MethodId m, const ProcessedDocument& doc, const CorpusPriors& priors,
                       const ExtractionConfig& cfg = {});

struct ScoredPhrase {
  std::string key;
  std::string surface;
  std::vector<std::string> stems;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based once ranked
  std::size_t first_position = 0;
};

/// Mean word score over each candidate's stems; missing stems count as zero.
std::vector<ScoredPhrase> aggregate_phrases(const WordScores& scores,
                                            std::span<const CandidatePhrase> candidates);

inline constexpr std::size_t kAllPhrases = std::numeric_limits<std::size_t>::max();

/// Sorts by score descending, then earlier first occurrence, then shorter key,
/// then key; keeps the first n and numbers them from 1. n must be positive.
std::vector<ScoredPhrase> top_n(std::vector<ScoredPhrase> scored, std::size_t n);

/// Candidates in order of first occurrence, scored 1/rank.
std::vector<ScoredPhrase> extract_firstn(const ProcessedDocument& doc, std::size_t n);

/// Representative of each of the n best topic clusters, with the cluster score.
std::vector<ScoredPhrase> extract_topicrank(const ProcessedDocument& doc, std::size_t n,
                                            const ExtractionConfig& cfg = {});

/// Ranks phrases with any word-graph method under an explicit prior.
std::vector<ScoredPhrase> extract_with_prior(MethodId m, const ProcessedDocument& doc,
                                             const PriorDistribution& prior, std::size_t n,
                                             const ExtractionConfig& cfg = {});

std::vector<ScoredPhrase> extract(MethodId m, const ProcessedDocument& doc,
                                  const CorpusPriors& priors, std::size_t n,
                                  const ExtractionConfig& cfg = {});

/// `{"doc_id", "method", "phrases": [{"surface", "stems", "score", "rank"}]}`
/// on one line, without the trailing newline. A non-empty dataset name is
/// added as a leading "dataset" field.
std::string prediction_json(std::string_view doc_id, MethodId m,
                            std::span<const ScoredPhrase> phrases, std::string_view dataset = {});

}  // namespace kex
