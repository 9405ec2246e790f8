#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kex/eval.hpp"
#include "kex/extractors.hpp"
#include "kex/priors.hpp"

namespace kex {

/// Settings shared by all subcommands. Defaults apply first, then a JSON
/// config file, then KEX_STOPWORDS, then command-line flags.
struct RunConfig {
  std::vector<std::filesystem::path> datasets;
  std::vector<MethodId> methods{kAllMethods.begin(), kAllMethods.end()};
  std::size_t top_n = 10;
  ExtractionConfig extraction;
  LdaParams lda;
  bool fit_lda = false;
  std::filesystem::path stopwords = std::filesystem::path(KEX_DATA_DIR) / "stopwords_en.txt";
  std::filesystem::path lexicon = std::filesystem::path(KEX_DATA_DIR) / "lexicon_en.tsv";
  std::filesystem::path output_dir = "kex-report";
  std::optional<std::filesystem::path> priors;
  unsigned jobs = 0;  // 0 = all cores
  std::size_t time_trials = 0;
  double significance_alpha = 0.05;
  TestKind test = TestKind::SignedRank;
  std::vector<std::string> analysis_metrics{"p@5", "mrr"};

  std::uint64_t seed() const { return lda.seed; }
};

/// Applies a JSON object on top of `cfg`. Unknown keys and ill-typed values
/// throw UsageError.
void apply_config_json(RunConfig& cfg, std::string_view json_text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// "all" or a comma-separated list of method names.
std::vector<MethodId> parse_method_list(std::string_view list);

/// Entry point of the `kex` tool. Returns 0 on success, 1 for usage errors
/// and 2 for data errors.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace kex
