#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kex {

enum class PosTag { Noun, Adj, Other };

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);

/// Coarse mapping of Penn Treebank tags: NN* -> Noun, JJ* -> Adj, else Other.
PosTag from_penn_tag(std::string_view penn);

struct Token {
  std::string surface;
  std::string stem;
  PosTag pos = PosTag::Other;
  std::size_t position = 0;
  std::size_t sentence_index = 0;
  bool is_stopword = false;
};

/// Half-open token span [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct CandidatePhrase {
  std::vector<std::string> stems;
  std::string key;      // stems joined by single spaces
  std::string surface;  // surface form of the first occurrence
  std::vector<Span> occurrences;

  std::size_t first_position() const { return occurrences.front().start; }
};

struct ProcessedDocument {
  std::string id;
  std::vector<Token> tokens;
  /// Ordered by first occurrence; keys are unique.
  std::vector<CandidatePhrase> candidates;
  /// Stem keys of gold phrases that match a candidate.
  std::set<std::string> filtered_gold;
  /// Distinct stem keys of all gold phrases before filtering.
  std::size_t gold_keys_total = 0;

  /// m_d: number of non-stopword tokens.
  std::size_t content_length() const;
  const CandidatePhrase* find_candidate(std::string_view key) const;
};

struct RawToken {
  std::size_t sentence_index = 0;
  std::string surface;
  friend bool operator==(const RawToken&, const RawToken&) = default;
};

/// Splits text into sentences and word tokens.
///
/// Sentences end at `.`, `!` or `?` followed by whitespace or end of text,
/// except a period directly after a single-letter token. Tokens are maximal
/// runs of alphanumeric code points, keeping hyphens and apostrophes that sit
/// between two such code points. Everything else separates tokens.
std::vector<RawToken> tokenize(std::string_view text);

/// Porter (1980) suffix stripping, steps 1a through 5b. Expects lowercase input.
std::string porter_stem(std::string_view word);

/// ASCII lowercase; other bytes are copied unchanged.
std::string to_lower(std::string_view s);

using StopwordSet = std::unordered_set<std::string>;

/// One lowercase token per line, '#' starts a comment line.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Lexicon lookup with suffix and shape fallbacks.
class PosTagger {
 public:
  PosTagger() = default;
  explicit PosTagger(std::unordered_map<std::string, PosTag> lexicon);

  /// TSV `word<TAB>tag`, tag in {NOUN, ADJ, OTHER}. Throws UsageError if the
  /// file is missing and DataError on malformed lines.
  static PosTagger load(const std::filesystem::path& path);

  /// Tags one sentence; the first token is treated as sentence-initial.
  std::vector<PosTag> tag(std::span<const std::string> sentence) const;

  std::optional<PosTag> lookup(std::string_view word) const;
  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  PosTag tag_word(const std::string& word, bool sentence_initial) const;

  std::unordered_map<std::string, PosTag> lexicon_;
};

/// Greedy left-to-right maximal (ADJ)*(NOUN)+ spans within a sentence,
/// broken at stopwords, merged by stem key.
std::vector<CandidatePhrase> extract_candidates(std::span<const Token> tokens,
                                                const StopwordSet& stopwords);

/// Stem key of an arbitrary phrase: tokenized, lowercased, stemmed, joined by spaces.
std::string phrase_stem_key(std::string_view phrase);

struct TaggedToken {
  std::string surface;
  std::string penn_tag;
};

/// Tokenization, stemming, tagging, stopword marking and candidate extraction.
class TextPipeline {
 public:
  TextPipeline(StopwordSet stopwords, PosTagger tagger)
      : stopwords_(std::move(stopwords)), tagger_(std::move(tagger)) {}

  ProcessedDocument process(std::string id, std::string_view text,
                            std::span<const std::string> gold = {}) const;

  /// Externally tagged input. Tokens without alphanumerics are dropped; a
  /// Penn `.` tag closes the current sentence.
  ProcessedDocument process_tagged(std::string id, std::span<const TaggedToken> tokens,
                                   std::span<const std::string> gold = {}) const;

  const StopwordSet& stopwords() const { return stopwords_; }
  const PosTagger& tagger() const { return tagger_; }

 private:
  ProcessedDocument finish(std::string id, std::vector<Token> tokens,
                           std::span<const std::string> gold) const;

  StopwordSet stopwords_;
  PosTagger tagger_;
};

}  // namespace kex
