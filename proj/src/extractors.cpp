#include "kex/extractors.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace kex {

namespace {

constexpr std::array<std::string_view, 11> kNames{
    "FirstN",       "TF",        "TFIDF",     "LexSpec",   "TextRank", "SingleRank",
    "PositionRank", "TopicRank", "SingleTPR", "TFIDFRank", "LexRank"};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

const TermStats& need_stats(MethodId m, const CorpusPriors& priors) {
  if (!priors.stats) {
    throw UsageError("method " + std::string(to_string(m)) + " requires priors (term statistics)");
  }
  return *priors.stats;
}

const TopicModel& need_topics(MethodId m, const CorpusPriors& priors) {
  if (!priors.topics) {
    throw UsageError("method " + std::string(to_string(m)) + " requires priors (topic model)");
  }
  return *priors.topics;
}

ScoredPhrase from_candidate(const CandidatePhrase& c, double score) {
  return {c.key, c.surface, c.stems, score, 0, c.first_position()};
}

}  // namespace

std::string_view to_string(MethodId m) { return kNames[static_cast<std::size_t>(m)]; }

std::optional<MethodId> parse_method(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (iequals(name, kNames[i])) return kAllMethods[i];
  }
  return std::nullopt;
}

PriorNeed required_priors(MethodId m) {
  switch (m) {
    case MethodId::TFIDF:
    case MethodId::LexSpec:
    case MethodId::TFIDFRank:
    case MethodId::LexRank:
      return PriorNeed::TermStats;
    case MethodId::SingleTPR:
      return PriorNeed::TopicModel;
    default:
      return PriorNeed::None;
  }
}

bool is_word_graph_method(MethodId m) {
  switch (m) {
    case MethodId::TextRank:
    case MethodId::SingleRank:
    case MethodId::PositionRank:
    case MethodId::SingleTPR:
    case MethodId::TFIDFRank:
    case MethodId::LexRank:
      return true;
    default:
      return false;
  }
}

std::size_t ExtractionConfig::window(MethodId m) const {
  if (auto it = windows.find(m); it != windows.end()) return it->second;
  return m == MethodId::TextRank ? textrank_window : default_window;
}

EdgeWeighting ExtractionConfig::weighting(MethodId m) const {
  if (auto it = weightings.find(m); it != weightings.end()) return it->second;
  return m == MethodId::TextRank ? EdgeWeighting::Binary : EdgeWeighting::Count;
}

GraphOptions method_graph_options(MethodId m, const ExtractionConfig& cfg) {
  GraphOptions o;
  o.window = cfg.window(m);
  o.weighting = cfg.weighting(m);
  o.all_words = cfg.graph_all_words;
  return o;
}

PriorDistribution method_prior(MethodId m, const ProcessedDocument& doc, const WordGraph& graph,
                               const CorpusPriors& priors) {
  switch (m) {
    case MethodId::TextRank:
    case MethodId::SingleRank:
      return uniform_prior(graph.size());
    case MethodId::PositionRank:
      return position_prior(doc, graph);
    case MethodId::SingleTPR:
      return topical_prior(doc, graph, need_topics(m, priors));
    case MethodId::TFIDFRank:
      return stat_prior(doc, graph, need_stats(m, priors), PriorKind::Tfidf);
    case MethodId::LexRank:
      return stat_prior(doc, graph, need_stats(m, priors), PriorKind::Specificity);
    default:
      throw UsageError(std::string(to_string(m)) + " is not a word-graph method");
  }
}

WordScores graph_word_scores(const WordGraph& graph, const PriorDistribution& prior,
                             const PageRankOptions<double>& opts) {
  WordScores out;
  if (graph.size() == 0) return out;
  const auto r = pagerank(graph, prior, opts);
  for (Eigen::Index i = 0; i < graph.size(); ++i) {
    out.emplace(graph.nodes[static_cast<std::size_t>(i)], r.scores(i));
  }
  return out;
}

WordScores score_words(MethodId m, const ProcessedDocument& doc, const CorpusPriors& priors,
                       const ExtractionConfig& cfg) {
  WordScores out;
  switch (m) {
    case MethodId::TF:
      for (const auto& [w, n] : term_frequencies(doc)) out.emplace(w, static_cast<double>(n));
      return out;
    case MethodId::TFIDF: {
      const TermStats& s = need_stats(m, priors);
      for (const auto& [w, n] : term_frequencies(doc)) {
        out.emplace(w, tfidf_score(n, s.document_frequency(w), s.doc_count));
      }
      return out;
    }
    case MethodId::LexSpec: {
      const TermStats& s = need_stats(m, priors);
      const std::uint64_t m_d = doc.content_length();
      for (const auto& [w, n] : term_frequencies(doc)) {
        double v = 0.0;
        try {
          v = specificity(n, s.total_tokens, s.corpus_frequency(w), m_d);
        } catch (const DataError&) {
          // Counts inconsistent with the statistics: undefined, scored as zero.
        }
        out.emplace(w, v);
      }
      return out;
    }
    case MethodId::FirstN:
    case MethodId::TopicRank:
      throw UsageError(std::string(to_string(m)) + " ranks phrases, not words");
    default: {
      const WordGraph g = build_graph(doc, method_graph_options(m, cfg));
      if (g.size() == 0) return out;
      return graph_word_scores(g, method_prior(m, doc, g, priors), cfg.pagerank);
    }
  }
}

std::vector<ScoredPhrase> aggregate_phrases(const WordScores& scores,
                                            std::span<const CandidatePhrase> candidates) {
  std::vector<ScoredPhrase> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    double sum = 0.0;
    for (const auto& s : c.stems) {
      if (auto it = scores.find(s); it != scores.end()) sum += it->second;
    }
    out.push_back(from_candidate(c, c.stems.empty() ? 0.0 : sum / static_cast<double>(c.stems.size())));
  }
  return out;
}

std::vector<ScoredPhrase> top_n(std::vector<ScoredPhrase> scored, std::size_t n) {
  if (n == 0) throw UsageError("top_n needs n >= 1");
  auto better = [](const ScoredPhrase& a, const ScoredPhrase& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.first_position != b.first_position) return a.first_position < b.first_position;
    if (a.key.size() != b.key.size()) return a.key.size() < b.key.size();
    return a.key < b.key;
  };
  const std::size_t keep = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  scored.resize(keep);
  for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = i + 1;
  return scored;
}

std::vector<ScoredPhrase> extract_firstn(const ProcessedDocument& doc, std::size_t n) {
  if (n == 0) throw UsageError("top_n needs n >= 1");
  std::vector<const CandidatePhrase*> order;
  for (const auto& c : doc.candidates) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const CandidatePhrase* a, const CandidatePhrase* b) {
    return a->first_position() < b->first_position();
  });
  std::vector<ScoredPhrase> out;
  for (std::size_t i = 0; i < order.size() && i < n; ++i) {
    out.push_back(from_candidate(*order[i], 1.0 / static_cast<double>(i + 1)));
    out.back().rank = i + 1;
  }
  return out;
}

std::vector<ScoredPhrase> extract_topicrank(const ProcessedDocument& doc, std::size_t n,
                                            const ExtractionConfig& cfg) {
  if (n == 0) throw UsageError("top_n needs n >= 1");
  const auto clusters = cluster_topics(doc.candidates, cfg.topic_threshold);
  if (clusters.empty()) return {};
  const auto scores = topic_graph_rank(clusters, doc, cfg.pagerank);
  std::vector<ScoredPhrase> out;
  out.reserve(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    out.push_back(from_candidate(*doc.find_candidate(clusters[i].representative), scores[i]));
  }
  return top_n(std::move(out), n);
}

std::vector<ScoredPhrase> extract_with_prior(MethodId m, const ProcessedDocument& doc,
                                             const PriorDistribution& prior, std::size_t n,
                                             const ExtractionConfig& cfg) {
  if (!is_word_graph_method(m)) {
    throw UsageError(std::string(to_string(m)) + " is not a word-graph method");
  }
  const WordGraph g = build_graph(doc, method_graph_options(m, cfg));
  const WordScores scores = g.size() == 0 ? WordScores{} : graph_word_scores(g, prior, cfg.pagerank);
  return top_n(aggregate_phrases(scores, doc.candidates), n);
}

std::vector<ScoredPhrase> extract(MethodId m, const ProcessedDocument& doc,
                                  const CorpusPriors& priors, std::size_t n,
                                  const ExtractionConfig& cfg) {
  switch (m) {
    case MethodId::FirstN:
      return extract_firstn(doc, n);
    case MethodId::TopicRank:
      return extract_topicrank(doc, n, cfg);
    default:
      return top_n(aggregate_phrases(score_words(m, doc, priors, cfg), doc.candidates), n);
  }
}

std::string prediction_json(std::string_view doc_id, MethodId m,
                            std::span<const ScoredPhrase> phrases, std::string_view dataset) {
  nlohmann::ordered_json j;
  if (!dataset.empty()) j["dataset"] = dataset;
  j["doc_id"] = doc_id;
  j["method"] = to_string(m);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : phrases) {
    arr.push_back({{"surface", p.surface}, {"stems", p.stems}, {"score", p.score}, {"rank", p.rank}});
  }
  j["phrases"] = std::move(arr);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace kex
