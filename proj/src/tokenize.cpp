#include <string>
#include <string_view>
#include <vector>

#include "kex/textproc.hpp"
#include "utf8.hpp"

namespace kex {

namespace {

bool is_joiner(char32_t cp) {
  return cp == '-' || cp == '\'' || cp == 0x2019 || cp == 0x2010 || cp == 0x2011;
}

bool is_terminal(char32_t cp) { return cp == '.' || cp == '!' || cp == '?'; }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<RawToken> tokenize(std::string_view text) {
  const std::u32string cps = utf8::decode_lossy(text);
  std::vector<RawToken> out;
  std::size_t sentence = 0;
  bool sentence_has_tokens = false;
  // Length in code points of the token ending right before position i, or 0.
  std::size_t adjacent_token_len = 0;
  bool adjacent_token_is_letter = false;

  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = cps[i];
    if (utf8::is_word_char(c)) {
      std::string surface;
      std::size_t len = 0;
      while (i < n) {
        if (utf8::is_word_char(cps[i])) {
          utf8::append(surface, cps[i]);
          ++len;
          ++i;
        } else if (is_joiner(cps[i]) && i + 1 < n && utf8::is_word_char(cps[i + 1])) {
          utf8::append(surface, cps[i]);
          ++len;
          ++i;
        } else {
          break;
        }
      }
      adjacent_token_len = len;
      adjacent_token_is_letter = len == 1 && utf8::is_letter(cps[i - 1]);
      out.push_back({sentence, std::move(surface)});
      sentence_has_tokens = true;
      continue;
    }

    if (is_terminal(c) && (i + 1 == n || utf8::is_space(cps[i + 1]))) {
      const bool initial = c == '.' && adjacent_token_len == 1 && adjacent_token_is_letter;
      if (!initial && sentence_has_tokens) {
        ++sentence;
        sentence_has_tokens = false;
      }
    }
    adjacent_token_len = 0;
    adjacent_token_is_letter = false;
    ++i;
  }
  return out;
}

}  // namespace kex
