#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "kex/corpus.hpp"
#include "kex/textproc.hpp"

namespace kex::testing {

inline std::filesystem::path data_dir() { return KEX_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return KEX_FIXTURE_DIR; }

inline const TextPipeline& bundled_pipeline() {
  static const TextPipeline pipeline(load_stopwords(data_dir() / "stopwords_en.txt"),
                                     PosTagger::load(data_dir() / "lexicon_en.tsv"));
  return pipeline;
}

/// Document whose tokens are the given words, all nouns with stem = word. Each
/// token sits in its own sentence so the candidates are the single words.
inline ProcessedDocument word_doc(std::string id, std::initializer_list<std::string> words) {
  ProcessedDocument d;
  d.id = std::move(id);
  std::size_t pos = 0;
  for (const auto& w : words) {
    Token t;
    t.surface = w;
    t.stem = w;
    t.pos = PosTag::Noun;
    t.sentence_index = pos;
    t.position = pos++;
    d.tokens.push_back(t);
  }
  d.candidates = extract_candidates(d.tokens, {});
  return d;
}

}  // namespace kex::testing
