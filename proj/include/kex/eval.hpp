#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kex/extractors.hpp"
#include "kex/priors.hpp"

namespace kex {

// ---------------------------------------------------------------------------
// Metrics. Predictions and gold are compared on stem keys.

/// |gold ∩ top-k| / min(|gold|, k). Throws UsageError for k < 1 or empty gold.
double precision_at_k(std::span<const ScoredPhrase> predicted, const std::set<std::string>& gold,
                      std::size_t k);

/// Reciprocal rank of the first correct prediction, 0 when none is correct.
double mrr(std::span<const ScoredPhrase> predicted, const std::set<std::string>& gold);

/// Top-k stem keys per document id.
using TopKeys = std::map<std::string, std::set<std::string>>;

/// Mean over shared documents of |A ∩ B| / min(|A|, |B|); documents where
/// either set is empty are skipped. Throws DataError when nothing is left.
double agreement(const TopKeys& a, const TopKeys& b);

// ---------------------------------------------------------------------------
// Significance tests (two-sided, normal approximation with tie and continuity
// corrections).

/// Paired signed-rank test. Zero differences are dropped; if all are zero
/// the p-value is 1. Throws UsageError for unequal lengths or fewer than 10 pairs.
double wilcoxon_paired(std::span<const double> xs, std::span<const double> ys);

/// Unpaired rank-sum (Mann-Whitney) test. Throws UsageError for an empty sample.
double wilcoxon_rank_sum(std::span<const double> xs, std::span<const double> ys);

enum class TestKind { SignedRank, RankSum };

struct SignificanceMatrix {
  std::vector<std::string> methods;
  std::vector<std::string> metrics;
  /// One symmetric methods x methods matrix per metric; NaN on the diagonal
  /// and where no test was possible.
  std::vector<Eigen::MatrixXd> p_values;
  double alpha = 0.05;

  double p(std::size_t metric, std::size_t a, std::size_t b) const {
    return p_values[metric](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
};

/// samples[metric][method] holds per-document values aligned across methods.
SignificanceMatrix significance_matrix(
    const std::vector<std::string>& methods, const std::vector<std::string>& metrics,
    const std::vector<std::vector<std::vector<double>>>& samples, double alpha = 0.05,
    TestKind kind = TestKind::SignedRank);

/// Non-dominated fronts, best first. A dominates B when A is never
/// significantly worse than B and is significantly better on at least one
/// metric, where "significantly better" means p < alpha and a higher mean.
/// means[i] holds method i's mean per metric, in sig.metrics order.
std::vector<std::vector<std::string>> pareto_rank(const std::vector<std::vector<double>>& means,
                                                  const SignificanceMatrix& sig, double alpha);

// ---------------------------------------------------------------------------
// Reports

inline constexpr std::array<std::string_view, 3> kMetrics{"p@5", "p@10", "mrr"};

struct DocumentScore {
  std::string dataset;
  std::string doc_id;
  std::string method;
  std::string metric;
  double value = 0.0;
};

struct MethodSummary {
  std::string dataset;
  std::string method;
  std::string metric;
  double value = 0.0;  // fraction in [0, 1]
  std::size_t documents = 0;
};

struct TimingRow {
  std::string prior;
  std::string method;
  double time_prior = 0.0;
  double time_total = 0.0;
  double time_per_doc = 0.0;
  double time_total_std = 0.0;  // across trials
  std::size_t trials = 0;
};

struct EvalReport {
  std::uint64_t seed = 0;
  std::vector<DocumentScore> per_document;
  std::vector<MethodSummary> summary;
  std::vector<TimingRow> timing;
  /// Documents skipped per dataset because their filtered gold was empty.
  std::map<std::string, std::size_t> excluded;
};

/// Scores one method's rankings (aligned with docs) and appends per-document
/// rows and dataset means to the report. Documents with empty filtered gold
/// are excluded and counted.
void evaluate_method(EvalReport& report, std::string_view dataset, std::string_view method,
                     std::span<const ProcessedDocument> docs,
                     std::span<const std::vector<ScoredPhrase>> rankings);

/// Timing-table prior group of a method: "tf", "tfidf", "lda" or "-".
std::string_view timing_prior_group(MethodId m);

struct TimingOptions {
  std::size_t trials = 1;
  ExtractionConfig extraction;
  LdaParams lda;
  std::size_t top_n = 10;
};

/// Mean wall-clock seconds over trials per method: fitting the method's prior
/// group, then extracting from every document single-threaded.
std::vector<TimingRow> time_methods(std::span<const ProcessedDocument> docs,
                                    std::span<const MethodId> methods, const TimingOptions& opts);

// ---------------------------------------------------------------------------
// CSV

/// `# seed=<seed>` then `dataset,method,metric,value`.
void write_summary_csv(std::ostream& out, const EvalReport& report);
/// `# seed=<seed>` then `dataset,doc_id,method,metric,value`.
void write_per_document_csv(std::ostream& out, const EvalReport& report);
/// `# seed=<seed>` then `prior,method,time_prior,time_total,time_per_doc`.
void write_timing_csv(std::ostream& out, const EvalReport& report);

/// Reads a per-document CSV; `#` lines are skipped. Throws DataError on a
/// bad header or malformed row.
std::vector<DocumentScore> read_per_document_csv(std::istream& in, std::string_view origin = "");

/// Quotes a CSV field when needed.
std::string csv_field(std::string_view s);
/// Splits one CSV line, honouring double quotes.
std::vector<std::string> split_csv_line(std::string_view line);

/// One table per metric: rows are datasets (plus AVG when there are several),
/// columns are methods, values are percentages with one decimal and the best
/// method of each row carries a `*`.
std::string render_summary_table(std::span<const MethodSummary> summary,
                                 std::span<const std::string> methods);

std::string render_timing_table(std::span<const TimingRow> rows);

}  // namespace kex
