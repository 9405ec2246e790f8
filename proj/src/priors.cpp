#include "kex/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "kex/parallel.hpp"

namespace kex {

// ---------------------------------------------------------------------------
// Term statistics

std::uint64_t TermStats::document_frequency(std::string_view stem) const {
  auto it = df.find(std::string(stem));
  return it == df.end() ? 0 : it->second;
}

std::uint64_t TermStats::corpus_frequency(std::string_view stem) const {
  auto it = corpus_tf.find(std::string(stem));
  return it == corpus_tf.end() ? 0 : it->second;
}

void TermStats::merge(const TermStats& other) {
  doc_count += other.doc_count;
  total_tokens += other.total_tokens;
  for (const auto& [w, n] : other.df) df[w] += n;
  for (const auto& [w, n] : other.corpus_tf) corpus_tf[w] += n;
}

std::unordered_map<std::string, std::uint64_t> term_frequencies(const ProcessedDocument& doc) {
  std::unordered_map<std::string, std::uint64_t> tf;
  for (const auto& t : doc.tokens) {
    if (!t.is_stopword) ++tf[t.stem];
  }
  return tf;
}

TermStats fit_term_stats(std::span<const ProcessedDocument> docs, unsigned jobs) {
  if (docs.empty()) throw DataError("cannot fit term statistics on an empty corpus");
  const std::size_t chunks = std::min<std::size_t>(resolve_jobs(jobs), docs.size());
  std::vector<TermStats> partial(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    TermStats& s = partial[c];
    for (std::size_t i = c; i < docs.size(); i += chunks) {
      const auto tf = term_frequencies(docs[i]);
      ++s.doc_count;
      for (const auto& [w, n] : tf) {
        ++s.df[w];
        s.corpus_tf[w] += n;
        s.total_tokens += n;
      }
    }
  });
  TermStats out = std::move(partial.front());
  for (std::size_t c = 1; c < chunks; ++c) out.merge(partial[c]);
  return out;
}

double tfidf_score(std::uint64_t tf, std::uint64_t df, std::uint64_t doc_count) {
  if (df == 0 || tf == 0) return 0.0;
  return static_cast<double>(tf) *
         std::log2(static_cast<double>(doc_count) / static_cast<double>(df));
}

double tfidf_score(std::string_view stem, const ProcessedDocument& doc, const TermStats& stats) {
  std::uint64_t tf = 0;
  for (const auto& t : doc.tokens) {
    if (!t.is_stopword && t.stem == stem) ++tf;
  }
  return tfidf_score(tf, stats.document_frequency(stem), stats.doc_count);
}

// ---------------------------------------------------------------------------
// Hypergeometric tail

namespace {

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace

double log_hypergeometric_tail(std::uint64_t f, std::uint64_t population, std::uint64_t successes,
                               std::uint64_t draws) {
  if (f == 0 || successes > population || draws > population || f > successes || f > draws) {
    throw DataError("hypergeometric tail outside its domain (f=" + std::to_string(f) +
                    ", M=" + std::to_string(population) + ", F=" + std::to_string(successes) +
                    ", m=" + std::to_string(draws) + ")");
  }
  const std::uint64_t failures = population - successes;
  const std::uint64_t lo = draws > failures ? draws - failures : 0;
  const std::uint64_t hi = std::min(successes, draws);
  if (f <= lo) return 0.0;  // every outcome in the support is >= f

  const auto N = static_cast<double>(population);
  const auto K = static_cast<double>(successes);
  const auto n = static_cast<double>(draws);
  auto log_pmf = [&](double x) {
    return log_choose(K, x) + log_choose(N - K, n - x) - log_choose(N, n);
  };
  const double mode = std::floor((n + 1.0) * (K + 1.0) / (N + 2.0));
  const auto fd = static_cast<double>(f);

  if (fd <= mode) {
    // Below the mode the upper tail is close to 1; sum the short lower tail
    // P(X <= f-1) instead and take its complement.
    double term = log_pmf(fd - 1.0);
    double lower = term;
    for (std::uint64_t l = f - 1; l > lo; --l) {
      const auto x = static_cast<double>(l);
      // P(l-1) / P(l)
      term += std::log(x * (N - K - n + x)) - std::log((K - x + 1.0) * (n - x + 1.0));
      lower = log_add(lower, term);
      if (term < lower - 60.0) break;
    }
    if (lower < -std::numbers::ln2) return std::min(std::log1p(-std::exp(lower)), 0.0);
  }

  double term = log_pmf(fd);
  double sum = term;
  for (std::uint64_t l = f; l < hi; ++l) {
    const auto x = static_cast<double>(l);
    // P(l+1) / P(l)
    const double log_ratio =
        std::log((K - x) * (n - x)) - std::log((x + 1.0) * (N - K - n + x + 1.0));
    term += log_ratio;
    sum = log_add(sum, term);
    // Past the mode terms only shrink; stop once they cannot move the sum.
    if (log_ratio < 0.0 && term < sum - 60.0) break;
  }
  return std::min(sum, 0.0);
}

double specificity(std::uint64_t f, std::uint64_t total_tokens, std::uint64_t corpus_tf,
                   std::uint64_t doc_length) {
  const double log_p = log_hypergeometric_tail(f, total_tokens, corpus_tf, doc_length);
  return std::max(0.0, -log_p / std::numbers::ln10);
}

double specificity_score(std::string_view stem, const ProcessedDocument& doc,
                         const TermStats& stats) {
  std::uint64_t f = 0;
  std::uint64_t m = 0;
  for (const auto& t : doc.tokens) {
    if (t.is_stopword) continue;
    ++m;
    if (t.stem == stem) ++f;
  }
  return specificity(f, stats.total_tokens, stats.corpus_frequency(stem), m);
}

// ---------------------------------------------------------------------------
// LDA

Eigen::VectorXd TopicModel::word_distribution(std::string_view stem) const {
  auto it = vocabulary.find(std::string(stem));
  if (it == vocabulary.end()) return {};
  return word_topic.row(it->second).transpose();
}

namespace {

class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng_()) * n) >> 64);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

TopicModel fit_lda(std::span<const ProcessedDocument> docs, const LdaParams& params,
                   const WarningHandler& warn) {
  if (docs.empty()) throw DataError("cannot fit LDA on an empty corpus");
  if (params.num_topics < 2) throw UsageError("LDA needs at least 2 topics");
  if (params.iterations < 1) throw UsageError("LDA needs at least 1 iteration");
  if (params.beta <= 0.0 || params.resolved_alpha() <= 0.0) {
    throw UsageError("LDA priors must be positive");
  }

  TopicModel model;
  model.params = params;
  {
    std::set<std::string> vocab;
    for (const auto& d : docs) {
      for (const auto& t : d.tokens) {
        if (!t.is_stopword) vocab.insert(t.stem);
      }
    }
    Eigen::Index i = 0;
    for (auto& w : vocab) model.vocabulary.emplace(w, i++);
  }
  const int K = params.num_topics;
  const auto V = static_cast<Eigen::Index>(model.vocabulary.size());
  if (V < K && warn) {
    warn("LDA vocabulary (" + std::to_string(V) + ") is smaller than the topic count (" +
         std::to_string(K) + ")");
  }

  std::vector<std::vector<Eigen::Index>> words(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : docs[d].tokens) {
      if (!t.is_stopword) words[d].push_back(model.vocabulary.at(t.stem));
    }
  }

  const double alpha = params.resolved_alpha();
  const double beta = params.beta;
  const double v_beta = static_cast<double>(V) * beta;
  Eigen::MatrixXi doc_topic = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(docs.size()), K);
  Eigen::MatrixXi word_topic = Eigen::MatrixXi::Zero(V, K);
  Eigen::VectorXi topic_total = Eigen::VectorXi::Zero(K);
  std::vector<std::vector<int>> z(docs.size());

  Uniform01 rng(params.seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    z[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      z[d][i] = k;
      ++doc_topic(static_cast<Eigen::Index>(d), k);
      ++word_topic(words[d][i], k);
      ++topic_total(k);
    }
  }

  std::vector<double> cumulative(static_cast<std::size_t>(K));
  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto di = static_cast<Eigen::Index>(d);
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const Eigen::Index w = words[d][i];
        int k = z[d][i];
        --doc_topic(di, k);
        --word_topic(w, k);
        --topic_total(k);

        double acc = 0.0;
        for (int t = 0; t < K; ++t) {
          acc += (doc_topic(di, t) + alpha) * (word_topic(w, t) + beta) / (topic_total(t) + v_beta);
          cumulative[static_cast<std::size_t>(t)] = acc;
        }
        const double u = rng() * acc;
        k = 0;
        while (k < K - 1 && cumulative[static_cast<std::size_t>(k)] <= u) ++k;

        z[d][i] = k;
        ++doc_topic(di, k);
        ++word_topic(w, k);
        ++topic_total(k);
      }
    }
  }

  model.word_topic = word_topic.cast<double>();
  for (Eigen::Index w = 0; w < V; ++w) {
    const double n = model.word_topic.row(w).sum();
    model.word_topic.row(w) /= n;
  }
  for (std::size_t d = 0; d < docs.size(); ++d) {
    Eigen::VectorXd theta = doc_topic.row(static_cast<Eigen::Index>(d)).transpose().cast<double>();
    const double n = theta.sum();
    if (n > 0.0) {
      theta /= n;
    } else {
      theta.setConstant(1.0 / K);
    }
    model.doc_topic[docs[d].id] = std::move(theta);
  }
  return model;
}

}  // namespace kex
