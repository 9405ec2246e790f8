#include "kex/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kex/corpus.hpp"
#include "kex/graphrank.hpp"
#include "kex/parallel.hpp"
#include "kex/priors_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kex {

namespace {

std::string lower(std::string_view s) { return to_lower(s); }

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

MethodId method_or_throw(std::string_view name) {
  auto m = parse_method(name);
  if (!m) throw UsageError("unknown method '" + std::string(name) + "'");
  return *m;
}

EdgeWeighting weighting_or_throw(std::string_view name) {
  const auto n = lower(name);
  if (n == "binary") return EdgeWeighting::Binary;
  if (n == "count") return EdgeWeighting::Count;
  throw UsageError("edge weighting must be 'binary' or 'count', got '" + std::string(name) + "'");
}

TestKind test_or_throw(std::string_view name) {
  const auto n = lower(name);
  if (n == "signed-rank") return TestKind::SignedRank;
  if (n == "rank-sum") return TestKind::RankSum;
  throw UsageError("test must be 'signed-rank' or 'rank-sum', got '" + std::string(name) + "'");
}

std::vector<std::string> metric_list(std::string_view list) {
  std::vector<std::string> out;
  for (auto& m : split(list, ',')) {
    if (m.empty()) continue;
    m = lower(m);
    if (std::find(kMetrics.begin(), kMetrics.end(), m) == kMetrics.end()) {
      throw UsageError("unknown metric '" + m + "' (expected p@5, p@10 or mrr)");
    }
    out.push_back(m);
  }
  if (out.empty()) throw UsageError("empty metric list");
  return out;
}

template <class T>
T get_as(const json& v, std::string_view key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + std::string(key) + "' has the wrong type");
  }
}

void apply_lda_json(LdaParams& p, bool& enabled, const json& j) {
  if (!j.is_object()) throw UsageError("config key 'lda' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "enabled") {
      enabled = get_as<bool>(v, "lda.enabled");
    } else if (k == "topics") {
      p.num_topics = get_as<int>(v, "lda.topics");
    } else if (k == "alpha") {
      p.alpha = get_as<double>(v, "lda.alpha");
    } else if (k == "beta") {
      p.beta = get_as<double>(v, "lda.beta");
    } else if (k == "iterations") {
      p.iterations = get_as<int>(v, "lda.iterations");
    } else {
      throw UsageError("unknown config key 'lda." + k + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Shared plumbing

TextPipeline make_pipeline(const RunConfig& cfg) {
  return TextPipeline(load_stopwords(cfg.stopwords), PosTagger::load(cfg.lexicon));
}

bool needs(const std::vector<MethodId>& methods, PriorNeed need) {
  return std::any_of(methods.begin(), methods.end(),
                     [&](MethodId m) { return required_priors(m) == need; });
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.top_n < 1) throw UsageError("--top must be at least 1");
  if (cfg.extraction.pagerank.lambda < 0.0 || cfg.extraction.pagerank.lambda > 1.0) {
    throw UsageError("lambda must lie in [0, 1]");
  }
  if (cfg.extraction.pagerank.max_iter < 1) throw UsageError("max_iter must be at least 1");
  if (!(cfg.extraction.pagerank.tol > 0.0)) throw UsageError("tol must be positive");
  if (cfg.extraction.default_window < 2 || cfg.extraction.textrank_window < 2) {
    throw UsageError("windows must be at least 2");
  }
  for (const auto& [m, w] : cfg.extraction.windows) {
    if (w < 2) throw UsageError("window for " + std::string(to_string(m)) + " must be at least 2");
  }
  if (!(cfg.extraction.topic_threshold > 0.0 && cfg.extraction.topic_threshold <= 1.0)) {
    throw UsageError("topic_threshold must lie in (0, 1]");
  }
  if (!(cfg.significance_alpha > 0.0 && cfg.significance_alpha < 1.0)) {
    throw UsageError("significance alpha must lie in (0, 1)");
  }
  if (cfg.methods.empty()) throw UsageError("no methods selected");
}

CorpusPriors fit_priors(const std::vector<ProcessedDocument>& docs, const RunConfig& cfg,
                        bool with_stats, bool with_lda) {
  CorpusPriors p;
  if (with_stats) p.stats = fit_term_stats(docs, cfg.jobs);
  if (with_lda) p.topics = fit_lda(docs, cfg.lda, stderr_warnings());
  return p;
}

// ---------------------------------------------------------------------------
// fit

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.datasets.size() != 1) throw UsageError("fit needs exactly one --dataset");
  if (!cfg.priors) throw UsageError("fit needs --out <priors file>");
  const TextPipeline pipeline = make_pipeline(cfg);
  const Dataset ds = load_dataset(cfg.datasets.front());
  if (ds.documents.empty()) throw DataError("dataset " + cfg.datasets.front().string() + " is empty");
  const auto docs = process_dataset(pipeline, ds, cfg.jobs);
  const CorpusPriors priors = fit_priors(docs, cfg, true, cfg.fit_lda);
  save_priors(*cfg.priors, priors);

  const auto& s = *priors.stats;
  out << "documents\t" << s.doc_count << "\n";
  out << "tokens\t" << s.total_tokens << "\n";
  out << "vocabulary\t" << s.df.size() << "\n";
  if (priors.topics) out << "topics\t" << priors.topics->num_topics() << "\n";
  err << "wrote " << cfg.priors->string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// extract

std::vector<RawDocument> read_inputs(const std::vector<std::string>& inputs) {
  std::vector<RawDocument> docs;
  if (inputs.empty() || (inputs.size() == 1 && inputs.front() == "-")) {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    docs.push_back({"stdin", ss.str(), {}, std::nullopt});
    return docs;
  }
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (p.extension() == ".jsonl" || fs::is_directory(p)) {
      auto ds = load_dataset(p);
      for (auto& d : ds.documents) docs.push_back(std::move(d));
      continue;
    }
    std::ifstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    docs.push_back({p.stem().string(), ss.str(), {}, std::nullopt});
  }
  return docs;
}

int cmd_extract(const RunConfig& cfg, const std::vector<std::string>& inputs,
                const std::optional<fs::path>& graph_dir, std::ostream& out) {
  CorpusPriors priors;
  if (cfg.priors) priors = load_priors(*cfg.priors);
  for (MethodId m : cfg.methods) {
    const PriorNeed need = required_priors(m);
    if ((need == PriorNeed::TermStats && !priors.stats) ||
        (need == PriorNeed::TopicModel && !priors.topics)) {
      throw UsageError("method " + std::string(to_string(m)) +
                       " requires priors (fit them with `kex fit` and pass --priors)");
    }
  }
  const TextPipeline pipeline = make_pipeline(cfg);
  Dataset ds;
  ds.documents = read_inputs(inputs);
  const auto docs = process_dataset(pipeline, ds, cfg.jobs);

  if (graph_dir) {
    fs::create_directories(*graph_dir);
    for (MethodId m : cfg.methods) {
      if (!is_word_graph_method(m)) continue;
      for (const auto& d : docs) {
        auto f = open_output(*graph_dir / (d.id + "." + lower(to_string(m)) + ".tsv"));
        write_edge_list(f, build_graph(d, method_graph_options(m, cfg.extraction)));
      }
    }
  }

  std::vector<std::string> lines(docs.size() * cfg.methods.size());
  parallel_for(lines.size(), cfg.jobs, [&](std::size_t i) {
    const auto& d = docs[i / cfg.methods.size()];
    const MethodId m = cfg.methods[i % cfg.methods.size()];
    const auto phrases = extract(m, d, priors, cfg.top_n, cfg.extraction);
    lines[i] = prediction_json(d.id, m, phrases);
  });
  for (const auto& l : lines) out << l << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.datasets.empty()) throw UsageError("bench needs at least one --dataset");
  const TextPipeline pipeline = make_pipeline(cfg);
  std::optional<CorpusPriors> external;
  if (cfg.priors) external = load_priors(*cfg.priors);

  for (const auto& path : cfg.datasets) {
    if (!fs::exists(path)) throw DataError("dataset path does not exist: " + path.string());
  }
  fs::create_directories(cfg.output_dir);
  auto predictions = open_output(cfg.output_dir / "predictions.jsonl");
  EvalReport report;
  report.seed = cfg.seed();
  std::vector<std::string> method_names;
  for (MethodId m : cfg.methods) method_names.emplace_back(to_string(m));

  for (const auto& path : cfg.datasets) {
    const Dataset ds = load_dataset(path);
    if (ds.documents.empty()) throw DataError("dataset " + path.string() + " is empty");
    const auto docs = process_dataset(pipeline, ds, cfg.jobs);
    const auto stats = dataset_stats(ds, docs);
    std::size_t gold_total = 0, gold_kept = 0;
    for (const auto& d : docs) {
      gold_total += d.gold_keys_total;
      gold_kept += d.filtered_gold.size();
    }
    err << std::fixed << std::setprecision(1) << ds.name << ": " << stats.size << " documents, "
        << stats.tokens.mean << " tokens/doc, diversity " << std::setprecision(3)
        << stats.diversity << ", gold kept " << gold_kept << "/" << gold_total << " ("
        << std::setprecision(1)
        << (gold_total ? 100.0 * static_cast<double>(gold_total - gold_kept) /
                             static_cast<double>(gold_total)
                       : 0.0)
        << "% discarded)\n";

    const CorpusPriors priors =
        external ? *external
                 : fit_priors(docs, cfg, needs(cfg.methods, PriorNeed::TermStats),
                              needs(cfg.methods, PriorNeed::TopicModel));

    for (MethodId m : cfg.methods) {
      std::vector<std::vector<ScoredPhrase>> rankings(docs.size());
      parallel_for(docs.size(), cfg.jobs, [&](std::size_t i) {
        rankings[i] = extract(m, docs[i], priors, kAllPhrases, cfg.extraction);
      });
      evaluate_method(report, ds.name, to_string(m), docs, rankings);
      for (std::size_t i = 0; i < docs.size(); ++i) {
        const std::size_t keep = std::min<std::size_t>(rankings[i].size(), cfg.top_n);
        predictions << prediction_json(docs[i].id, m, std::span(rankings[i].data(), keep), ds.name)
                    << '\n';
      }
    }
    if (report.excluded[ds.name] > 0) {
      err << ds.name << ": " << report.excluded[ds.name]
          << " documents without matching gold excluded from the means\n";
    }
    if (cfg.time_trials > 0) {
      TimingOptions t;
      t.trials = cfg.time_trials;
      t.extraction = cfg.extraction;
      t.lda = cfg.lda;
      t.top_n = cfg.top_n;
      auto rows = time_methods(docs, cfg.methods, t);
      report.timing.insert(report.timing.end(), rows.begin(), rows.end());
    }
  }

  {
    auto f = open_output(cfg.output_dir / "summary.csv");
    write_summary_csv(f, report);
  }
  {
    auto f = open_output(cfg.output_dir / "per_document.csv");
    write_per_document_csv(f, report);
  }
  if (!report.timing.empty()) {
    auto f = open_output(cfg.output_dir / "timing.csv");
    write_timing_csv(f, report);
  }

  out << "# seed=" << report.seed << "\n";
  out << render_summary_table(report.summary, method_names);
  if (!report.timing.empty()) out << render_timing_table(report.timing);
  err << "reports written to " << cfg.output_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalysisInput {
  std::vector<DocumentScore> rows;
  /// method -> "dataset/doc" -> top-5 stem keys
  std::map<std::string, TopKeys> top5;
};

void read_predictions(const fs::path& path, AnalysisInput& in) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      const std::string doc =
          j.value("dataset", std::string()) + "/" + j.at("doc_id").get<std::string>();
      auto& keys = in.top5[j.at("method").get<std::string>()][doc];
      std::size_t taken = 0;
      for (const auto& p : j.at("phrases")) {
        if (taken++ == 5) break;
        std::string key;
        for (const auto& s : p.at("stems")) key += (key.empty() ? "" : " ") + s.get<std::string>();
        keys.insert(key);
      }
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

AnalysisInput read_analysis_inputs(const std::vector<std::string>& reports,
                                   const std::vector<std::string>& prediction_files) {
  AnalysisInput in;
  for (const auto& r : reports) {
    fs::path csv = r;
    if (fs::is_directory(csv)) {
      if (fs::exists(csv / "predictions.jsonl")) read_predictions(csv / "predictions.jsonl", in);
      csv /= "per_document.csv";
    }
    std::ifstream f(csv);
    if (!f) throw DataError("cannot read " + csv.string());
    auto rows = read_per_document_csv(f, csv.string());
    in.rows.insert(in.rows.end(), rows.begin(), rows.end());
  }
  for (const auto& p : prediction_files) read_predictions(p, in);
  return in;
}

std::string fmt_p(double p) {
  if (std::isnan(p)) return "NA";
  std::ostringstream s;
  s << std::setprecision(6) << p;
  return s.str();
}

std::string fixed2(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

std::string grid(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> w;
  for (const auto& r : cells) {
    if (w.size() < r.size()) w.resize(r.size(), 0);
    for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
  }
  std::ostringstream out;
  for (const auto& r : cells) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out << "  ";
      out << (c ? std::right : std::left) << std::setw(static_cast<int>(w[c])) << r[c];
    }
    out << '\n';
  }
  return out.str();
}

int cmd_analyze(const RunConfig& cfg, const std::vector<std::string>& reports,
                const std::vector<std::string>& prediction_files, std::ostream& out,
                std::ostream& err) {
  if (reports.empty()) throw UsageError("analyze needs at least one per-document report");
  const AnalysisInput in = read_analysis_inputs(reports, prediction_files);

  std::vector<std::string> methods;
  // metric -> method -> doc -> value
  std::map<std::string, std::map<std::string, std::map<std::string, double>>> values;
  for (const auto& r : in.rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    values[r.metric][r.method][r.dataset + "/" + r.doc_id] = r.value;
  }
  if (methods.empty()) throw DataError("the reports contain no rows");

  // Documents scored by every method, per metric.
  std::vector<std::vector<std::vector<double>>> samples;
  std::vector<std::vector<double>> means(methods.size());
  for (const auto& metric : cfg.analysis_metrics) {
    auto mit = values.find(metric);
    if (mit == values.end()) throw DataError("the reports have no '" + metric + "' rows");
    std::vector<std::string> shared;
    for (const auto& [doc, v] : mit->second[methods.front()]) {
      const bool everywhere = std::all_of(methods.begin(), methods.end(), [&](const auto& m) {
        return mit->second[m].contains(doc);
      });
      if (everywhere) shared.push_back(doc);
    }
    if (shared.empty()) throw DataError("no document is scored by every method on " + metric);
    std::vector<std::vector<double>> per_method;
    for (std::size_t m = 0; m < methods.size(); ++m) {
      std::vector<double> xs;
      for (const auto& doc : shared) xs.push_back(mit->second[methods[m]][doc]);
      double mean = 0.0;
      for (double x : xs) mean += x;
      means[m].push_back(mean / static_cast<double>(xs.size()));
      per_method.push_back(std::move(xs));
    }
    samples.push_back(std::move(per_method));
    err << metric << ": " << shared.size() << " shared documents";
    if (shared.size() < 10) err << " (too few for a significance test, p-values are NA)";
    err << '\n';
  }

  const SignificanceMatrix sig = significance_matrix(methods, cfg.analysis_metrics, samples,
                                                     cfg.significance_alpha, cfg.test);
  const auto fronts = pareto_rank(means, sig, cfg.significance_alpha);

  fs::create_directories(cfg.output_dir);
  {
    auto f = open_output(cfg.output_dir / "wilcoxon.csv");
    f << "# seed=" << cfg.seed() << "\n";
    f << "metric,method_a,method_b,p_value\n";
    for (std::size_t k = 0; k < sig.metrics.size(); ++k) {
      for (std::size_t a = 0; a < methods.size(); ++a) {
        for (std::size_t b = a + 1; b < methods.size(); ++b) {
          f << sig.metrics[k] << ',' << csv_field(methods[a]) << ',' << csv_field(methods[b])
            << ',' << fmt_p(sig.p(k, a, b)) << '\n';
        }
      }
    }
  }
  {
    auto f = open_output(cfg.output_dir / "pareto.csv");
    f << "# seed=" << cfg.seed() << "\n";
    f << "front,method\n";
    for (std::size_t i = 0; i < fronts.size(); ++i) {
      for (const auto& m : fronts[i]) f << (i + 1) << ',' << csv_field(m) << '\n';
    }
  }

  out << "# seed=" << cfg.seed() << "\n";
  if (!in.top5.empty()) {
    std::vector<std::vector<std::string>> cells{{"agreement"}};
    auto f = open_output(cfg.output_dir / "agreement.csv");
    f << "# seed=" << cfg.seed() << "\n";
    f << "method";
    for (const auto& m : methods) {
      f << ',' << csv_field(m);
      cells[0].push_back(m);
    }
    f << '\n';
    for (const auto& a : methods) {
      f << csv_field(a);
      cells.push_back({a});
      for (const auto& b : methods) {
        double v = std::nan("");
        auto ia = in.top5.find(a);
        auto ib = in.top5.find(b);
        if (a == b && ia != in.top5.end()) {
          v = 1.0;
        } else if (ia != in.top5.end() && ib != in.top5.end()) {
          try {
            v = agreement(ia->second, ib->second);
          } catch (const DataError&) {
          }
        }
        f << ',' << (std::isnan(v) ? std::string("NA") : fmt_p(v));
        cells.back().push_back(std::isnan(v) ? "NA" : fixed2(v));
      }
      f << '\n';
    }
    out << grid(cells) << '\n';
  } else {
    err << "no predictions supplied; agreement matrix skipped\n";
  }

  for (std::size_t k = 0; k < sig.metrics.size(); ++k) {
    std::vector<std::vector<std::string>> cells{{"p " + sig.metrics[k]}};
    for (const auto& m : methods) cells[0].push_back(m);
    for (std::size_t a = 0; a < methods.size(); ++a) {
      cells.push_back({methods[a]});
      for (std::size_t b = 0; b < methods.size(); ++b) {
        cells.back().push_back(a == b ? "-" : (std::isnan(sig.p(k, a, b)) ? "NA" : fixed2(sig.p(k, a, b))));
      }
    }
    out << grid(cells) << '\n';
  }
  out << "pareto ranking (alpha " << cfg.significance_alpha << "):\n";
  for (std::size_t i = 0; i < fronts.size(); ++i) {
    out << "  (" << (i + 1) << ")";
    for (std::size_t j = 0; j < fronts[i].size(); ++j) out << (j ? ", " : " ") << fronts[i][j];
    out << '\n';
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::vector<MethodId> parse_method_list(std::string_view list) {
  if (lower(list) == "all") return {kAllMethods.begin(), kAllMethods.end()};
  std::vector<MethodId> out;
  for (const auto& name : split(list, ',')) {
    if (name.empty()) continue;
    const MethodId m = method_or_throw(name);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw UsageError("empty method list");
  return out;
}

void apply_config_json(RunConfig& cfg, std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  auto& ex = cfg.extraction;
  for (const auto& [k, v] : j.items()) {
    if (k == "datasets") {
      cfg.datasets.clear();
      for (const auto& d : get_as<std::vector<std::string>>(v, k)) cfg.datasets.emplace_back(d);
    } else if (k == "methods") {
      cfg.methods = v.is_string()
                        ? parse_method_list(v.get<std::string>())
                        : parse_method_list([&] {
                            std::string joined;
                            for (const auto& s : get_as<std::vector<std::string>>(v, k)) {
                              joined += (joined.empty() ? "" : ",") + s;
                            }
                            return joined;
                          }());
    } else if (k == "top_n") {
      cfg.top_n = get_as<std::size_t>(v, k);
    } else if (k == "window") {
      ex.default_window = get_as<std::size_t>(v, k);
    } else if (k == "windows") {
      if (!v.is_object()) throw UsageError("config key 'windows' must be an object");
      for (const auto& [m, w] : v.items()) {
        ex.windows[method_or_throw(m)] = get_as<std::size_t>(w, "windows." + m);
      }
    } else if (k == "weightings") {
      if (!v.is_object()) throw UsageError("config key 'weightings' must be an object");
      for (const auto& [m, w] : v.items()) {
        ex.weightings[method_or_throw(m)] =
            weighting_or_throw(get_as<std::string>(w, "weightings." + m));
      }
    } else if (k == "lambda") {
      ex.pagerank.lambda = get_as<double>(v, k);
    } else if (k == "tol") {
      ex.pagerank.tol = get_as<double>(v, k);
    } else if (k == "max_iter") {
      ex.pagerank.max_iter = get_as<int>(v, k);
    } else if (k == "topic_threshold") {
      ex.topic_threshold = get_as<double>(v, k);
    } else if (k == "graph_all_words") {
      ex.graph_all_words = get_as<bool>(v, k);
    } else if (k == "lda") {
      apply_lda_json(cfg.lda, cfg.fit_lda, v);
    } else if (k == "seed") {
      cfg.lda.seed = get_as<std::uint64_t>(v, k);
    } else if (k == "stopwords") {
      cfg.stopwords = get_as<std::string>(v, k);
    } else if (k == "lexicon") {
      cfg.lexicon = get_as<std::string>(v, k);
    } else if (k == "output_dir") {
      cfg.output_dir = get_as<std::string>(v, k);
    } else if (k == "priors") {
      cfg.priors = fs::path(get_as<std::string>(v, k));
    } else if (k == "jobs") {
      cfg.jobs = get_as<unsigned>(v, k);
    } else if (k == "time_trials") {
      cfg.time_trials = get_as<std::size_t>(v, k);
    } else if (k == "alpha") {
      cfg.significance_alpha = get_as<double>(v, k);
    } else if (k == "test") {
      cfg.test = test_or_throw(get_as<std::string>(v, k));
    } else if (k == "metrics") {
      std::string joined;
      for (const auto& s : get_as<std::vector<std::string>>(v, k)) {
        joined += (joined.empty() ? "" : ",") + s;
      }
      cfg.analysis_metrics = metric_list(joined);
    } else {
      throw UsageError("unknown config key '" + k + "'");
    }
  }
}

void apply_config_file(RunConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_json(cfg, ss.str());
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised keyword extraction and benchmarking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kex 1.0.0");

  // Options shared by every subcommand; only explicitly given ones override
  // the config file.
  struct Flags {
    std::string config;
    std::vector<std::string> datasets;
    std::string methods;
    std::size_t top_n = 0;
    std::size_t window = 0;
    std::size_t textrank_window = 0;
    double lambda = 0, tol = 0, topic_threshold = 0;
    int max_iter = 0;
    bool all_words = false;
    std::string stopwords, lexicon, out_dir, priors;
    unsigned jobs = 0;
    std::uint64_t seed = 0;
    bool lda = false;
    int topics = 0, iterations = 0;
    double lda_alpha = 0, beta = 0;
    std::size_t time = 0;
    double alpha = 0;
    std::string test, metrics;
    std::vector<std::string> inputs, predictions;
    std::string graph_dir;
  } f;

  std::multimap<std::string, CLI::Option*> given;
  auto add = [&](const char* name) -> CLI::Option*& {
    return given.emplace(name, nullptr)->second;
  };
  auto common = [&](CLI::App* sub) {
    add("config") = sub->add_option("--config", f.config, "JSON config file");
    add("stopwords") = sub->add_option("--stopwords", f.stopwords, "stopword list");
    add("lexicon") = sub->add_option("--lexicon", f.lexicon, "POS lexicon");
    add("jobs") = sub->add_option("--jobs,-j", f.jobs, "worker threads (0 = all cores)");
    add("seed") = sub->add_option("--seed", f.seed, "random seed (LDA)");
  };
  auto extraction = [&](CLI::App* sub) {
    add("methods") = sub->add_option("--methods,--method,-m", f.methods,
                                       "'all' or comma-separated method names");
    add("window") = sub->add_option("--window", f.window, "co-occurrence window (default 10)");
    add("textrank_window") = sub->add_option("--textrank-window", f.textrank_window, "TextRank window (default 2)");
    add("lambda") = sub->add_option("--lambda", f.lambda, "teleport weight (default 0.15)");
    add("tol") = sub->add_option("--tol", f.tol, "PageRank L1 tolerance (default 1e-6)");
    add("max_iter") = sub->add_option("--max-iter", f.max_iter, "PageRank iterations (default 100)");
    add("topic_threshold") = sub->add_option("--topic-threshold", f.topic_threshold, "TopicRank clustering threshold");
    add("all_words") = sub->add_flag("--graph-all-words", f.all_words, "keep stopwords as graph nodes");
    add("top") = sub->add_option("--top,-n", f.top_n, "phrases per document (default 10)");
  };
  auto lda = [&](CLI::App* sub) {
    add("topics") = sub->add_option("--topics", f.topics, "LDA topic count (default 50)");
    add("iterations") = sub->add_option("--lda-iterations", f.iterations, "Gibbs sweeps (default 1000)");
    add("lda_alpha") = sub->add_option("--lda-alpha", f.lda_alpha, "document prior (default 50/K)");
    add("beta") = sub->add_option("--lda-beta", f.beta, "word prior (default 0.01)");
  };

  CLI::App* fit = app.add_subcommand("fit", "fit dataset priors");
  common(fit);
  lda(fit);
  add("fit_dataset") = fit->add_option("--dataset,-d", f.datasets, "dataset directory or JSONL");
  add("lda") = fit->add_flag("--lda", f.lda, "also fit the topic model");
  add("fit_out") = fit->add_option("--out,-o", f.priors, "priors file to write");

  CLI::App* ext = app.add_subcommand("extract", "extract keyphrases to JSONL");
  common(ext);
  extraction(ext);
  add("ext_priors") = ext->add_option("--priors,-p", f.priors, "priors file from `kex fit`");
  add("graph_dir") = ext->add_option("--dump-graph", f.graph_dir, "write edge lists here");
  ext->add_option("inputs", f.inputs, "text, JSONL or dataset inputs ('-' = stdin)");

  CLI::App* bench = app.add_subcommand("bench", "evaluate methods on datasets");
  common(bench);
  extraction(bench);
  lda(bench);
  add("bench_dataset") = bench->add_option("--dataset,-d", f.datasets, "dataset (repeatable)");
  add("bench_out") = bench->add_option("--out,-o", f.out_dir, "report directory");
  add("bench_priors") = bench->add_option("--priors,-p", f.priors, "use these priors instead of fitting per dataset");
  add("time") = bench->add_option("--time", f.time, "timing trials per method");

  CLI::App* analyze = app.add_subcommand("analyze", "agreement, significance and Pareto ranking");
  common(analyze);
  analyze->add_option("reports", f.inputs, "per-document CSVs or bench directories")->required();
  analyze->add_option("--predictions", f.predictions, "predictions JSONL for agreement");
  add("an_out") = analyze->add_option("--out,-o", f.out_dir, "output directory");
  add("alpha") = analyze->add_option("--alpha", f.alpha, "significance level (default 0.05)");
  add("test") = analyze->add_option("--test", f.test, "signed-rank or rank-sum");
  add("metrics") = analyze->add_option("--metrics", f.metrics, "metrics (default p@5,mrr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  auto has = [&](const char* name) {
    const auto [lo, hi] = given.equal_range(name);
    return std::any_of(lo, hi, [](const auto& e) { return e.second->count() > 0; });
  };

  try {
    RunConfig cfg;
    if (has("config")) apply_config_file(cfg, f.config);
    if (const char* env = std::getenv("KEX_STOPWORDS"); env && *env) cfg.stopwords = env;
    if (has("stopwords")) cfg.stopwords = f.stopwords;
    if (has("lexicon")) cfg.lexicon = f.lexicon;
    if (has("jobs")) cfg.jobs = f.jobs;
    if (has("seed")) cfg.lda.seed = f.seed;
    if (has("methods")) cfg.methods = parse_method_list(f.methods);
    if (has("window")) cfg.extraction.default_window = f.window;
    if (has("textrank_window")) cfg.extraction.textrank_window = f.textrank_window;
    if (has("lambda")) cfg.extraction.pagerank.lambda = f.lambda;
    if (has("tol")) cfg.extraction.pagerank.tol = f.tol;
    if (has("max_iter")) cfg.extraction.pagerank.max_iter = f.max_iter;
    if (has("topic_threshold")) cfg.extraction.topic_threshold = f.topic_threshold;
    if (has("all_words")) cfg.extraction.graph_all_words = f.all_words;
    if (has("top")) cfg.top_n = f.top_n;
    if (has("topics")) cfg.lda.num_topics = f.topics;
    if (has("iterations")) cfg.lda.iterations = f.iterations;
    if (has("lda_alpha")) cfg.lda.alpha = f.lda_alpha;
    if (has("beta")) cfg.lda.beta = f.beta;
    if (has("lda")) cfg.fit_lda = f.lda;
    if (has("fit_dataset") || has("bench_dataset")) {
      cfg.datasets.assign(f.datasets.begin(), f.datasets.end());
    }
    if (has("fit_out") || has("ext_priors") || has("bench_priors")) cfg.priors = fs::path(f.priors);
    if (has("bench_out") || has("an_out")) cfg.output_dir = f.out_dir;
    if (has("time")) cfg.time_trials = f.time;
    if (has("alpha")) cfg.significance_alpha = f.alpha;
    if (has("test")) cfg.test = test_or_throw(f.test);
    if (has("metrics")) cfg.analysis_metrics = metric_list(f.metrics);
    validate(cfg);

    if (fit->parsed()) return cmd_fit(cfg, out, err);
    if (ext->parsed()) {
      std::optional<fs::path> graph_dir;
      if (has("graph_dir")) graph_dir = fs::path(f.graph_dir);
      return cmd_extract(cfg, f.inputs, graph_dir, out);
    }
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    return cmd_analyze(cfg, f.inputs, f.predictions, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace kex
