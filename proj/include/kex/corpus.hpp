#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kex/error.hpp"
#include "kex/textproc.hpp"

namespace kex {

struct RawDocument {
  std::string id;
  std::string text;
  std::vector<std::string> gold;
  /// Present when the source supplied its own tokens and Penn tags.
  std::optional<std::vector<TaggedToken>> tagged;
};

struct Dataset {
  std::string name;
  /// Sorted by id.
  std::vector<RawDocument> documents;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct DatasetStats {
  std::size_t size = 0;
  MeanStd tokens;
  MeanStd unique_tokens;
  MeanStd noun_phrases;
  MeanStd gold;
  MeanStd multiword_gold;
  /// unique_tokens.mean / tokens.mean
  double diversity = 0.0;
};

/// Loads `<root>/docsutf8/*.txt` with `<root>/keys/<id>.key`, or a JSONL file
/// (the path itself, or the only `*.jsonl` inside a directory). JSONL records
/// carry `id`, `text` and `keywords`, or `tokens: [{surface, pos}]` instead of
/// `text` for pre-tagged input.
///
/// Invalid UTF-8 is replaced with U+FFFD and reported through `warn`, as are
/// missing key files. Throws DataError for unreadable paths, malformed records
/// and duplicate ids.
Dataset load_dataset(const std::filesystem::path& path,
                     const WarningHandler& warn = stderr_warnings());

/// Distinct stem keys of gold phrases; empty phrases are dropped.
std::set<std::string> gold_stem_keys(std::span<const std::string> gold);

/// Gold keys that equal the stem key of one of the document's candidates.
std::set<std::string> filter_gold(const ProcessedDocument& doc,
                                  const std::set<std::string>& gold_keys);

/// Runs the pipeline on every document, `jobs` at a time (0 = all cores).
std::vector<ProcessedDocument> process_dataset(const TextPipeline& pipeline, const Dataset& ds,
                                               unsigned jobs = 1);

/// Throws DataError for an empty dataset or misaligned inputs.
DatasetStats dataset_stats(const Dataset& ds, std::span<const ProcessedDocument> processed);

}  // namespace kex
