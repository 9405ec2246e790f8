#include "kex/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <string>

#include "kex/corpus.hpp"
#include "kex/error.hpp"
#include "utf8.hpp"

namespace kex {

std::string_view to_string(PosTag tag) {
  switch (tag) {
    case PosTag::Noun: return "NOUN";
    case PosTag::Adj: return "ADJ";
    case PosTag::Other: return "OTHER";
  }
  return "OTHER";
}

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  if (name == "NOUN") return PosTag::Noun;
  if (name == "ADJ") return PosTag::Adj;
  if (name == "OTHER") return PosTag::Other;
  return std::nullopt;
}

PosTag from_penn_tag(std::string_view penn) {
  if (penn.starts_with("NN")) return PosTag::Noun;
  if (penn.starts_with("JJ")) return PosTag::Adj;
  return PosTag::Other;
}

std::size_t ProcessedDocument::content_length() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return !t.is_stopword; }));
}

const CandidatePhrase* ProcessedDocument::find_candidate(std::string_view key) const {
  for (const auto& c : candidates) {
    if (c.key == key) return &c;
  }
  return nullptr;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open stopword file: " + path.string());
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    out.insert(to_lower(w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tagger

PosTagger::PosTagger(std::unordered_map<std::string, PosTag> lexicon)
    : lexicon_(std::move(lexicon)) {}

PosTagger PosTagger::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open lexicon file: " + path.string());
  std::unordered_map<std::string, PosTag> lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("# ")) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected word<TAB>tag");
    }
    const auto tag = parse_pos_tag(trim(std::string_view(line).substr(tab + 1)));
    if (!tag) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": unknown tag");
    }
    lex.emplace(line.substr(0, tab), *tag);
  }
  return PosTagger(std::move(lex));
}

std::optional<PosTag> PosTagger::lookup(std::string_view word) const {
  const std::string w(word);
  if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
  const std::string lower = to_lower(w);
  if (auto it = lexicon_.find(lower); it != lexicon_.end()) return it->second;

  // Regular plurals of lexicon nouns.
  auto noun = [&](const std::string& base) {
    auto it = lexicon_.find(base);
    return it != lexicon_.end() && it->second == PosTag::Noun;
  };
  if (lower.size() > 3 && lower.ends_with("s") && !lower.ends_with("ss")) {
    if (lower.ends_with("ies") && noun(lower.substr(0, lower.size() - 3) + "y")) {
      return PosTag::Noun;
    }
    if (lower.ends_with("es") && noun(lower.substr(0, lower.size() - 2))) return PosTag::Noun;
    if (noun(lower.substr(0, lower.size() - 1))) return PosTag::Noun;
  }
  // Hyphenated compounds take the tag of their head (last) segment.
  if (const auto dash = lower.rfind('-'); dash != std::string::npos && dash + 1 < lower.size()) {
    if (auto it = lexicon_.find(lower.substr(dash + 1)); it != lexicon_.end()) return it->second;
  }
  return std::nullopt;
}

PosTag PosTagger::tag_word(const std::string& word, bool sentence_initial) const {
  if (auto hit = lookup(word)) return *hit;

  const std::string lower = to_lower(word);
  static constexpr std::string_view noun_suffixes[] = {"ness", "tion", "ity", "ment", "er", "ism"};
  static constexpr std::string_view adj_suffixes[] = {"ous", "ful", "ive", "able", "al", "ic"};
  for (auto s : noun_suffixes) {
    if (lower.size() > s.size() && lower.ends_with(s)) return PosTag::Noun;
  }
  for (auto s : adj_suffixes) {
    if (lower.size() > s.size() && lower.ends_with(s)) return PosTag::Adj;
  }

  const bool capitalized = utf8::is_upper(utf8::decode_lossy(word).front());
  if ((capitalized && !sentence_initial) || has_digit(word)) return PosTag::Noun;
  return PosTag::Other;
}

std::vector<PosTag> PosTagger::tag(std::span<const std::string> sentence) const {
  std::vector<PosTag> out;
  out.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) out.push_back(tag_word(sentence[i], i == 0));
  return out;
}

// ---------------------------------------------------------------------------
// Candidates

std::vector<CandidatePhrase> extract_candidates(std::span<const Token> tokens,
                                                const StopwordSet& stopwords) {
  std::vector<CandidatePhrase> out;
  std::map<std::string, std::size_t> index;

  auto emit = [&](std::size_t start, std::size_t end) {
    CandidatePhrase phrase;
    std::string surface;
    for (std::size_t i = start; i < end; ++i) {
      phrase.stems.push_back(tokens[i].stem);
      if (!surface.empty()) {
        surface.push_back(' ');
        phrase.key.push_back(' ');
      }
      surface += tokens[i].surface;
      phrase.key += tokens[i].stem;
    }
    const Span span{tokens[start].position, tokens[end - 1].position + 1};
    auto [it, inserted] = index.emplace(phrase.key, out.size());
    if (inserted) {
      phrase.surface = std::move(surface);
      phrase.occurrences.push_back(span);
      out.push_back(std::move(phrase));
    } else {
      out[it->second].occurrences.push_back(span);
    }
  };

  std::optional<std::size_t> open;  // start index into `tokens`
  bool has_noun = false;
  auto close = [&](std::size_t end) {
    if (open && has_noun) emit(*open, end);
    open.reset();
    has_noun = false;
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (i > 0 && t.sentence_index != tokens[i - 1].sentence_index) close(i);
    const bool stop = stopwords.contains(to_lower(t.surface));
    if (stop || t.pos == PosTag::Other) {
      close(i);
    } else if (t.pos == PosTag::Noun) {
      if (!open) open = i;
      has_noun = true;
    } else {  // adjective
      if (open && has_noun) close(i);
      if (!open) open = i;
    }
  }
  close(tokens.size());
  return out;
}

std::string phrase_stem_key(std::string_view phrase) {
  std::string key;
  for (const auto& t : tokenize(phrase)) {
    if (!key.empty()) key.push_back(' ');
    key += porter_stem(to_lower(t.surface));
  }
  return key;
}

// ---------------------------------------------------------------------------
// Pipeline

ProcessedDocument TextPipeline::process(std::string id, std::string_view text,
                                        std::span<const std::string> gold) const {
  const auto raw = tokenize(text);
  std::vector<Token> tokens;
  tokens.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Token t;
    t.surface = raw[i].surface;
    t.position = i;
    t.sentence_index = raw[i].sentence_index;
    tokens.push_back(std::move(t));
  }

  std::vector<std::string> sentence;
  for (std::size_t begin = 0; begin < tokens.size();) {
    std::size_t end = begin;
    sentence.clear();
    while (end < tokens.size() && tokens[end].sentence_index == tokens[begin].sentence_index) {
      sentence.push_back(tokens[end].surface);
      ++end;
    }
    const auto tags = tagger_.tag(sentence);
    for (std::size_t k = 0; k < tags.size(); ++k) tokens[begin + k].pos = tags[k];
    begin = end;
  }
  return finish(std::move(id), std::move(tokens), gold);
}

ProcessedDocument TextPipeline::process_tagged(std::string id, std::span<const TaggedToken> tagged,
                                               std::span<const std::string> gold) const {
  std::vector<Token> tokens;
  std::size_t sentence = 0;
  bool sentence_has_tokens = false;
  for (const auto& tt : tagged) {
    if (tt.penn_tag == ".") {
      if (sentence_has_tokens) {
        ++sentence;
        sentence_has_tokens = false;
      }
      continue;
    }
    const auto cps = utf8::decode_lossy(tt.surface);
    if (std::none_of(cps.begin(), cps.end(), utf8::is_word_char)) continue;
    Token t;
    t.surface = tt.surface;
    t.pos = from_penn_tag(tt.penn_tag);
    t.position = tokens.size();
    t.sentence_index = sentence;
    tokens.push_back(std::move(t));
    sentence_has_tokens = true;
  }
  return finish(std::move(id), std::move(tokens), gold);
}

ProcessedDocument TextPipeline::finish(std::string id, std::vector<Token> tokens,
                                       std::span<const std::string> gold) const {
  for (auto& t : tokens) {
    const std::string lower = to_lower(t.surface);
    t.stem = porter_stem(lower);
    t.is_stopword = stopwords_.contains(lower);
  }
  ProcessedDocument doc;
  doc.id = std::move(id);
  doc.tokens = std::move(tokens);
  doc.candidates = extract_candidates(doc.tokens, stopwords_);
  const auto gold_keys = gold_stem_keys(gold);
  doc.gold_keys_total = gold_keys.size();
  doc.filtered_gold = filter_gold(doc, gold_keys);
  return doc;
}

}  // namespace kex
