#include "kex/eval.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

namespace kex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Average ranks (1-based) of values, ties sharing the mean rank. Also
/// returns the sum of t^3 - t over tie groups.
std::vector<double> average_ranks(const std::vector<double>& values, double& tie_term) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

double two_sided_normal(double z) { return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0))); }

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Metrics

double precision_at_k(std::span<const ScoredPhrase> predicted, const std::set<std::string>& gold,
                      std::size_t k) {
  if (k < 1) throw UsageError("precision@k needs k >= 1");
  if (gold.empty()) throw UsageError("precision@k is undefined for an empty gold set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size() && i < k; ++i) {
    hits += gold.count(predicted[i].key);
  }
  return static_cast<double>(hits) / static_cast<double>(std::min(gold.size(), k));
}

double mrr(std::span<const ScoredPhrase> predicted, const std::set<std::string>& gold) {
  if (gold.empty()) throw UsageError("MRR is undefined for an empty gold set");
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (gold.contains(predicted[i].key)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double agreement(const TopKeys& a, const TopKeys& b) {
  double total = 0.0;
  std::size_t used = 0;
  for (const auto& [doc, sa] : a) {
    auto it = b.find(doc);
    if (it == b.end() || sa.empty() || it->second.empty()) continue;
    std::size_t common = 0;
    for (const auto& k : sa) common += it->second.count(k);
    total += static_cast<double>(common) /
             static_cast<double>(std::min(sa.size(), it->second.size()));
    ++used;
  }
  if (used == 0) throw DataError("agreement: the two methods share no scorable documents");
  return total / static_cast<double>(used);
}

// ---------------------------------------------------------------------------
// Significance

double wilcoxon_paired(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw UsageError("paired test needs samples of equal length");
  if (xs.size() < 10) throw UsageError("paired test needs at least 10 pairs");
  std::vector<double> diff;
  std::vector<double> magnitude;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    if (d == 0.0) continue;
    diff.push_back(d);
    magnitude.push_back(std::abs(d));
  }
  if (diff.empty()) return 1.0;
  const auto n = static_cast<double>(diff.size());
  double ties = 0.0;
  const auto ranks = average_ranks(magnitude, ties);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (diff[i] > 0.0) w_plus += ranks[i];
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ties / 48.0;
  if (var <= 0.0) return 1.0;
  double d = w_plus - mean;
  d -= 0.5 * sign(d);
  return two_sided_normal(d / std::sqrt(var));
}

double wilcoxon_rank_sum(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw UsageError("rank-sum test needs two non-empty samples");
  std::vector<double> pooled(xs.begin(), xs.end());
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  double ties = 0.0;
  const auto ranks = average_ranks(pooled, ties);
  const auto n1 = static_cast<double>(xs.size());
  const auto n2 = static_cast<double>(ys.size());
  const double n = n1 + n2;
  double r1 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) r1 += ranks[i];
  const double u1 = r1 - n1 * (n1 + 1.0) / 2.0;
  const double u = std::max(u1, n1 * n2 - u1);
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  return two_sided_normal((u - n1 * n2 / 2.0 - 0.5) / std::sqrt(var));
}

SignificanceMatrix significance_matrix(
    const std::vector<std::string>& methods, const std::vector<std::string>& metrics,
    const std::vector<std::vector<std::vector<double>>>& samples, double alpha, TestKind kind) {
  if (samples.size() != metrics.size()) throw UsageError("one sample set per metric expected");
  SignificanceMatrix sig;
  sig.methods = methods;
  sig.metrics = metrics;
  sig.alpha = alpha;
  const auto m = static_cast<Eigen::Index>(methods.size());
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    if (samples[k].size() != methods.size()) throw UsageError("one sample per method expected");
    Eigen::MatrixXd p = Eigen::MatrixXd::Constant(m, m, kNaN);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = a + 1; b < m; ++b) {
        const auto& xa = samples[k][static_cast<std::size_t>(a)];
        const auto& xb = samples[k][static_cast<std::size_t>(b)];
        double v = kNaN;
        try {
          v = kind == TestKind::SignedRank ? wilcoxon_paired(xa, xb) : wilcoxon_rank_sum(xa, xb);
        } catch (const UsageError&) {
          // Too few documents: left blank.
        }
        p(a, b) = p(b, a) = v;
      }
    }
    sig.p_values.push_back(std::move(p));
  }
  return sig;
}

std::vector<std::vector<std::string>> pareto_rank(const std::vector<std::vector<double>>& means,
                                                  const SignificanceMatrix& sig, double alpha) {
  const std::size_t n = sig.methods.size();
  if (means.size() != n) throw UsageError("pareto_rank: one mean vector per method expected");
  for (const auto& m : means) {
    if (m.size() != sig.metrics.size()) throw UsageError("pareto_rank: metric count mismatch");
  }
  auto better = [&](std::size_t a, std::size_t b, std::size_t k) {
    const double p = sig.p(k, a, b);
    return !std::isnan(p) && p < alpha && means[a][k] > means[b][k];
  };
  auto dominates = [&](std::size_t a, std::size_t b) {
    bool strictly = false;
    for (std::size_t k = 0; k < sig.metrics.size(); ++k) {
      if (better(b, a, k)) return false;
      strictly = strictly || better(a, b, k);
    }
    return strictly;
  };

  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<std::vector<std::string>> fronts;
  while (!remaining.empty()) {
    std::vector<std::size_t> front, rest;
    for (std::size_t a : remaining) {
      const bool dominated = std::any_of(remaining.begin(), remaining.end(),
                                         [&](std::size_t b) { return b != a && dominates(b, a); });
      (dominated ? rest : front).push_back(a);
    }
    if (front.empty()) std::swap(front, rest);  // dominance cycle: keep the rest together
    std::vector<std::string> names;
    for (std::size_t i : front) names.push_back(sig.methods[i]);
    fronts.push_back(std::move(names));
    remaining = std::move(rest);
  }
  return fronts;
}

// ---------------------------------------------------------------------------
// Reports

void evaluate_method(EvalReport& report, std::string_view dataset, std::string_view method,
                     std::span<const ProcessedDocument> docs,
                     std::span<const std::vector<ScoredPhrase>> rankings) {
  if (docs.size() != rankings.size()) throw UsageError("one ranking per document expected");
  std::array<double, kMetrics.size()> sums{};
  std::size_t scored = 0;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& gold = docs[i].filtered_gold;
    if (gold.empty()) {
      ++excluded;
      continue;
    }
    const std::array<double, kMetrics.size()> values{precision_at_k(rankings[i], gold, 5),
                                                     precision_at_k(rankings[i], gold, 10),
                                                     mrr(rankings[i], gold)};
    for (std::size_t k = 0; k < kMetrics.size(); ++k) {
      sums[k] += values[k];
      report.per_document.push_back({std::string(dataset), docs[i].id, std::string(method),
                                     std::string(kMetrics[k]), values[k]});
    }
    ++scored;
  }
  report.excluded[std::string(dataset)] = excluded;
  for (std::size_t k = 0; k < kMetrics.size(); ++k) {
    const double mean = scored == 0 ? 0.0 : sums[k] / static_cast<double>(scored);
    report.summary.push_back(
        {std::string(dataset), std::string(method), std::string(kMetrics[k]), mean, scored});
  }
}

std::string_view timing_prior_group(MethodId m) {
  switch (m) {
    case MethodId::TF:
    case MethodId::LexSpec:
    case MethodId::LexRank:
      return "tf";
    case MethodId::TFIDF:
    case MethodId::TFIDFRank:
      return "tfidf";
    case MethodId::SingleTPR:
      return "lda";
    default:
      return "-";
  }
}

std::vector<TimingRow> time_methods(std::span<const ProcessedDocument> docs,
                                    std::span<const MethodId> methods, const TimingOptions& opts) {
  if (opts.trials < 1) throw UsageError("timing needs at least one trial");
  if (docs.empty()) throw DataError("timing on an empty dataset");
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };

  std::vector<TimingRow> rows;
  for (MethodId m : methods) {
    const std::string_view group = timing_prior_group(m);
    std::vector<double> prior_times, totals;
    for (std::size_t t = 0; t < opts.trials; ++t) {
      const auto start = clock::now();
      CorpusPriors priors;
      if (group == "tf" || group == "tfidf") {
        priors.stats = fit_term_stats(docs, 1);
      } else if (group == "lda") {
        priors.topics = fit_lda(docs, opts.lda, {});
      }
      const auto fitted = clock::now();
      std::size_t sink = 0;
      for (const auto& d : docs) sink += extract(m, d, priors, opts.top_n, opts.extraction).size();
      const auto done = clock::now();
      if (sink == std::numeric_limits<std::size_t>::max()) rows.clear();  // keep the loop live
      prior_times.push_back(group == "-" ? 0.0 : seconds(fitted - start));
      totals.push_back(seconds(done - start));
    }
    const auto k = static_cast<double>(opts.trials);
    TimingRow row;
    row.prior = std::string(group);
    row.method = std::string(to_string(m));
    row.trials = opts.trials;
    row.time_prior = std::accumulate(prior_times.begin(), prior_times.end(), 0.0) / k;
    row.time_total = std::accumulate(totals.begin(), totals.end(), 0.0) / k;
    double ss = 0.0;
    for (double v : totals) ss += (v - row.time_total) * (v - row.time_total);
    row.time_total_std = std::sqrt(ss / k);
    row.time_per_doc = row.time_total / static_cast<double>(docs.size());
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
  out << "# seed=" << report.seed << "\n";
  out << "dataset,method,metric,value\n";
  for (const auto& r : report.summary) {
    out << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << r.metric << ','
        << shortest(r.value) << '\n';
  }
}

void write_per_document_csv(std::ostream& out, const EvalReport& report) {
  out << "# seed=" << report.seed << "\n";
  out << "dataset,doc_id,method,metric,value\n";
  for (const auto& r : report.per_document) {
    out << csv_field(r.dataset) << ',' << csv_field(r.doc_id) << ',' << csv_field(r.method) << ','
        << r.metric << ',' << shortest(r.value) << '\n';
  }
}

void write_timing_csv(std::ostream& out, const EvalReport& report) {
  out << "# seed=" << report.seed << "\n";
  out << "prior,method,time_prior,time_total,time_per_doc\n";
  for (const auto& r : report.timing) {
    out << r.prior << ',' << r.method << ',' << shortest(r.time_prior) << ','
        << shortest(r.time_total) << ',' << shortest(r.time_per_doc) << '\n';
  }
}

std::vector<DocumentScore> read_per_document_csv(std::istream& in, std::string_view origin) {
  std::vector<DocumentScore> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  const std::string where = origin.empty() ? std::string("per-document CSV") : std::string(origin);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#' || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (!header) {
      if (f != std::vector<std::string>{"dataset", "doc_id", "method", "metric", "value"}) {
        throw DataError(where + ": expected header dataset,doc_id,method,metric,value");
      }
      header = true;
      continue;
    }
    if (f.size() != 5) {
      throw DataError(where + ":" + std::to_string(lineno) + ": expected 5 fields");
    }
    double v = 0.0;
    const auto* end = f[4].data() + f[4].size();
    const auto res = std::from_chars(f[4].data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
      throw DataError(where + ":" + std::to_string(lineno) + ": bad value '" + f[4] + "'");
    }
    rows.push_back({f[0], f[1], f[2], f[3], v});
  }
  if (!header) throw DataError(where + ": missing header");
  return rows;
}

// ---------------------------------------------------------------------------
// Console tables

namespace {

std::string render_grid(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << cells[r][c];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[c])) << cells[r][c];
      }
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
      out << std::string(total, '-') << '\n';
    }
  }
  return out.str();
}

std::string percent(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << v * 100.0;
  return s.str();
}

}  // namespace

std::string render_summary_table(std::span<const MethodSummary> summary,
                                 std::span<const std::string> methods) {
  std::vector<std::string> datasets;
  for (const auto& s : summary) {
    if (std::find(datasets.begin(), datasets.end(), s.dataset) == datasets.end()) {
      datasets.push_back(s.dataset);
    }
  }
  std::ostringstream out;
  for (std::string_view metric : kMetrics) {
    std::map<std::pair<std::string, std::string>, double> value;
    for (const auto& s : summary) {
      if (s.metric == metric) value[{s.dataset, s.method}] = s.value;
    }
    if (value.empty()) continue;
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> head{std::string(metric)};
    head.insert(head.end(), methods.begin(), methods.end());
    cells.push_back(head);

    auto add_row = [&](const std::string& label, const std::vector<std::optional<double>>& vals) {
      double best = -1.0;
      for (const auto& v : vals) {
        if (v) best = std::max(best, std::round(*v * 1000.0));
      }
      std::vector<std::string> row{label};
      for (const auto& v : vals) {
        if (!v) {
          row.push_back("-");
        } else {
          row.push_back(percent(*v) + (std::round(*v * 1000.0) == best ? "*" : " "));
        }
      }
      cells.push_back(std::move(row));
    };

    std::vector<double> avg_sum(methods.size(), 0.0);
    std::vector<std::size_t> avg_n(methods.size(), 0);
    for (const auto& ds : datasets) {
      std::vector<std::optional<double>> vals;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        auto it = value.find({ds, methods[m]});
        if (it == value.end()) {
          vals.emplace_back();
        } else {
          vals.emplace_back(it->second);
          avg_sum[m] += it->second;
          ++avg_n[m];
        }
      }
      add_row(ds, vals);
    }
    if (datasets.size() > 1) {
      std::vector<std::optional<double>> vals;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        if (avg_n[m] == 0) {
          vals.emplace_back();
        } else {
          vals.emplace_back(avg_sum[m] / static_cast<double>(avg_n[m]));
        }
      }
      add_row("AVG", vals);
    }
    out << render_grid(cells) << '\n';
  }
  return out.str();
}

std::string render_timing_table(std::span<const TimingRow> rows) {
  std::vector<std::vector<std::string>> cells{
      {"method", "prior", "prior (s)", "total (s)", "per doc (s)"}};
  auto fmt = [](double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
  };
  for (const auto& r : rows) {
    cells.push_back({r.method, r.prior, r.prior == "-" ? "-" : fmt(r.time_prior, 3),
                     fmt(r.time_total, 3), fmt(r.time_per_doc, 5)});
  }
  return render_grid(cells);
}

}  // namespace kex
