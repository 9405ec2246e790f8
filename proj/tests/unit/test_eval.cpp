#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "kex/eval.hpp"

using namespace kex;

namespace {

std::vector<ScoredPhrase> ranked(std::initializer_list<std::string> keys) {
  std::vector<ScoredPhrase> out;
  std::size_t r = 1;
  for (const auto& k : keys) {
    ScoredPhrase p;
    p.key = k;
    p.rank = r++;
    out.push_back(p);
  }
  return out;
}

std::set<std::string> gold_of(std::initializer_list<std::string> keys) { return keys; }

nlohmann::json wilcoxon_reference() {
  std::ifstream in(testing::fixture_dir() / "wilcoxon_reference.json");
  return nlohmann::json::parse(in);
}

SignificanceMatrix matrix_2x2(double p_metric0, double p_metric1) {
  SignificanceMatrix s;
  s.methods = {"A", "B"};
  s.metrics = {"p@5", "mrr"};
  for (double p : {p_metric0, p_metric1}) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(2, 2, std::nan(""));
    m(0, 1) = m(1, 0) = p;
    s.p_values.push_back(m);
  }
  return s;
}

}  // namespace

TEST_CASE("precision at k") {
  const auto pred = ranked({"a", "x", "b", "y", "z", "c"});
  CHECK(precision_at_k(pred, gold_of({"a", "b", "c", "d", "e", "f", "g"}), 5) ==
        doctest::Approx(0.4));
  CHECK(precision_at_k(pred, gold_of({"a", "b"}), 5) == 1.0);
  CHECK(precision_at_k(pred, gold_of({"q"}), 5) == 0.0);
  CHECK(precision_at_k(ranked({}), gold_of({"q"}), 5) == 0.0);
  CHECK_THROWS_AS(precision_at_k(pred, gold_of({"a"}), 0), UsageError);
  CHECK_THROWS_AS(precision_at_k(pred, {}, 5), UsageError);

  // While |gold| >= k the hit count k * P@k never decreases; P@k itself can
  // rise again (2/3 at k=3, 3/4 at k=4 here).
  const auto gold = gold_of({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});
  const auto pred2 = ranked({"a", "b", "x", "c", "y", "z"});
  double prev_hits = 0.0;
  for (std::size_t k = 1; k <= 6; ++k) {
    const double hits = precision_at_k(pred2, gold, k) * static_cast<double>(k);
    CHECK(hits >= prev_hits - 1e-12);
    prev_hits = hits;
  }
  CHECK(precision_at_k(pred2, gold, 4) > precision_at_k(pred2, gold, 3));
}

TEST_CASE("mean reciprocal rank") {
  CHECK(mrr(ranked({"x", "y", "a"}), gold_of({"a"})) == doctest::Approx(1.0 / 3.0));
  CHECK(mrr(ranked({"a", "y"}), gold_of({"a"})) == 1.0);
  CHECK(mrr(ranked({"x", "y"}), gold_of({"a"})) == 0.0);
}

TEST_CASE("agreement") {
  const TopKeys a{{"d1", {"a", "b", "c", "d", "e"}}, {"d2", {}}};
  const TopKeys b{{"d1", {"a", "b", "v", "w", "x"}}, {"d2", {"q"}}};
  const TopKeys c{{"d1", {"v", "w", "x", "y", "z"}}};
  CHECK(agreement(a, a) == 1.0);
  CHECK(agreement(a, c) == 0.0);
  CHECK(agreement(a, b) == doctest::Approx(0.4));
  CHECK(agreement(a, b) == agreement(b, a));
  const TopKeys small{{"d1", {"a", "b"}}};
  CHECK(agreement(a, small) == 1.0);
  CHECK_THROWS_AS(agreement(a, TopKeys{{"other", {"a"}}}), DataError);
}

TEST_CASE("signed-rank test conventions") {
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x[static_cast<std::size_t>(i)] = i * 0.37;
    y[static_cast<std::size_t>(i)] = i * 0.37 + 1.0;
  }
  CHECK(wilcoxon_paired(x, x) == 1.0);
  CHECK(wilcoxon_paired(y, x) < 0.001);
  CHECK(wilcoxon_paired(x, y) == wilcoxon_paired(y, x));
  CHECK_THROWS_AS(wilcoxon_paired(std::vector<double>(9, 0.0), std::vector<double>(9, 1.0)),
                  UsageError);
  CHECK_THROWS_AS(wilcoxon_paired(x, std::vector<double>(29, 0.0)), UsageError);
}

TEST_CASE("signed-rank and rank-sum tests match the reference implementation") {
  const auto ref = wilcoxon_reference();
  std::size_t n = 0;
  for (const auto& f : ref["random"]) {
    const auto x = f["x"].get<std::vector<double>>();
    const auto y = f["y"].get<std::vector<double>>();
    CHECK(wilcoxon_paired(x, y) == doctest::Approx(f["signed_rank_p"].get<double>()).epsilon(1e-9));
    CHECK(wilcoxon_rank_sum(x, y) == doctest::Approx(f["rank_sum_p"].get<double>()).epsilon(1e-9));
    CHECK(wilcoxon_paired(x, y) == doctest::Approx(wilcoxon_paired(y, x)).epsilon(1e-15));
    ++n;
  }
  CHECK(n == 20);
  const auto& t = ref["twelve_pair"];
  CHECK(std::abs(wilcoxon_paired(t["x"].get<std::vector<double>>(),
                                 t["y"].get<std::vector<double>>()) -
                 t["signed_rank_p"].get<double>()) < 1e-3);
}

TEST_CASE("pareto ranking") {
  SUBCASE("clear winner") {
    const auto fronts = pareto_rank({{0.5, 0.6}, {0.3, 0.4}}, matrix_2x2(0.001, 0.001), 0.05);
    CHECK(fronts == std::vector<std::vector<std::string>>{{"A"}, {"B"}});
  }
  SUBCASE("nothing significant") {
    const auto fronts = pareto_rank({{0.5, 0.6}, {0.3, 0.4}}, matrix_2x2(0.2, 0.3), 0.05);
    CHECK(fronts == std::vector<std::vector<std::string>>{{"A", "B"}});
  }
  SUBCASE("trade-off") {
    const auto fronts = pareto_rank({{0.5, 0.3}, {0.3, 0.4}}, matrix_2x2(0.001, 0.001), 0.05);
    CHECK(fronts.size() == 1);
  }
  SUBCASE("better on one metric, tied on the other") {
    const auto fronts = pareto_rank({{0.5, 0.3}, {0.3, 0.4}}, matrix_2x2(0.001, 0.5), 0.05);
    CHECK(fronts == std::vector<std::vector<std::string>>{{"A"}, {"B"}});
  }
}

TEST_CASE("evaluation report and CSV round trip") {
  std::vector<ProcessedDocument> docs(3);
  docs[0].id = "d1";
  docs[0].filtered_gold = {"a", "b"};
  docs[1].id = "d2";
  docs[1].filtered_gold = {"c"};
  docs[2].id = "d3";  // empty gold, excluded
  const std::vector<std::vector<ScoredPhrase>> rankings{ranked({"x", "a", "b"}), ranked({"y"}),
                                                        ranked({"z"})};
  EvalReport report;
  report.seed = 7;
  evaluate_method(report, "set", "M", docs, rankings);
  CHECK(report.excluded.at("set") == 1);
  REQUIRE(report.summary.size() == 3);
  CHECK(report.summary[0].metric == "p@5");
  CHECK(report.summary[0].value == 0.5);
  CHECK(report.summary[2].metric == "mrr");
  CHECK(report.summary[2].value == 0.25);
  CHECK(report.summary[0].documents == 2);

  std::stringstream csv;
  write_per_document_csv(csv, report);
  CHECK(csv.str().rfind("# seed=7\ndataset,doc_id,method,metric,value\n", 0) == 0);
  const auto rows = read_per_document_csv(csv);
  REQUIRE(rows.size() == report.per_document.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].doc_id == report.per_document[i].doc_id);
    CHECK(rows[i].value == report.per_document[i].value);
  }

  std::stringstream summary;
  write_summary_csv(summary, report);
  CHECK(summary.str().find("set,M,p@5,0.5\n") != std::string::npos);

  std::stringstream bad("dataset,doc,method\n");
  CHECK_THROWS_AS(read_per_document_csv(bad), DataError);
  std::stringstream badval("dataset,doc_id,method,metric,value\ns,d,m,p@5,abc\n");
  CHECK_THROWS_AS(read_per_document_csv(badval), DataError);
}

TEST_CASE("CSV quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(split_csv_line("\"a,b\",\"say \"\"hi\"\"\",c") ==
        std::vector<std::string>{"a,b", "say \"hi\"", "c"});
}

TEST_CASE("console table marks the best method") {
  const std::vector<MethodSummary> s{{"inspec", "TF", "p@5", 0.189, 10},
                                     {"inspec", "TFIDF", "p@5", 0.315, 10}};
  const std::vector<std::string> methods{"TF", "TFIDF"};
  const auto table = render_summary_table(s, methods);
  CHECK(table.find("18.9 ") != std::string::npos);
  CHECK(table.find("31.5*") != std::string::npos);
}

TEST_CASE("timing") {
  std::vector<ProcessedDocument> docs{testing::word_doc("d", {"a", "b", "a"})};
  const std::vector<MethodId> methods{MethodId::FirstN, MethodId::TFIDF};
  TimingOptions opts;
  opts.trials = 2;
  const auto rows = time_methods(docs, methods, opts);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].prior == "-");
  CHECK(rows[0].time_prior == 0.0);
  CHECK(rows[0].time_per_doc == rows[0].time_total);
  CHECK(rows[1].prior == "tfidf");
  CHECK(rows[1].time_prior > 0.0);
  CHECK(rows[1].time_total >= rows[1].time_prior);
  opts.trials = 0;
  CHECK_THROWS_AS(time_methods(docs, methods, opts), UsageError);
}
