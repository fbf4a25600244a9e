#include "cogstream/cogload.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>

#include "cogstream/error.hpp"

namespace cogstream::cogload {

namespace {

bool is_word_byte(unsigned char c) {
  // Non-ASCII bytes are kept inside words so UTF-8 letters do not split them.
  return std::isalpha(c) || c == '\'' || c >= 0x80;
}

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::string normalize(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (unsigned char c : word) {
    if (std::isalpha(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

bool is_complex(std::string_view word, bool sentence_start) {
  if (!sentence_start && std::isupper(static_cast<unsigned char>(word[0]))) {
    return false;  // proper-noun proxy
  }
  const std::string w = normalize(word);
  if (count_syllables(w) < 3) return false;
  for (std::string_view suffix : {"es", "ed", "ing"}) {
    if (ends_with(w, suffix) && w.size() > suffix.size()) {
      const std::string_view stem =
          std::string_view(w).substr(0, w.size() - suffix.size());
      if (count_syllables(stem) == 2) return false;
    }
  }
  return true;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Longest valid tag is "<10>".
bool is_tag_prefix(std::string_view s) {
  if (s.empty() || s[0] != '<') return false;
  if (s.size() == 1) return true;
  if (s[1] < '1' || s[1] > '9') return false;
  if (s.size() == 2) return true;
  if (s.size() == 3) return s[2] == '>' || (s[1] == '1' && s[2] == '0');
  return s.size() == 4 && s == "<10>";
}

std::optional<int> complete_tag(std::string_view s) {
  if (s.size() == 3 && s[0] == '<' && s[1] >= '1' && s[1] <= '9' &&
      s[2] == '>') {
    return s[1] - '0';
  }
  if (s == "<10>") return 10;
  return std::nullopt;
}

}  // namespace

CogScore::CogScore(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw Error(Errc::BadInput, "cognitive load score must be in 1..10");
  }
}

int count_syllables(std::string_view word) {
  const std::string w = normalize(word);
  if (w.empty()) return 1;
  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  if (w.back() == 'e') {
    const bool consonant_le = w.size() >= 3 && ends_with(w, "le") &&
                              !is_vowel(w[w.size() - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

TextCounts count_text(std::string_view text) {
  TextCounts counts;
  bool sentence_start = true;
  std::size_t words_in_sentence = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      std::size_t j = i;
      while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      std::string_view word = text.substr(i, j - i);
      while (!word.empty() && word.front() == '\'') word.remove_prefix(1);
      while (!word.empty() && word.back() == '\'') word.remove_suffix(1);
      if (!word.empty()) {
        ++counts.words;
        ++words_in_sentence;
        counts.syllables += static_cast<std::size_t>(count_syllables(word));
        if (is_complex(word, sentence_start)) ++counts.complex_words;
        sentence_start = false;
      }
      i = j;
      continue;
    }
    if (is_terminator(static_cast<char>(c))) {
      const bool boundary =
          i + 1 == n || std::isspace(static_cast<unsigned char>(text[i + 1]));
      if (boundary && words_in_sentence > 0) {
        ++counts.sentences;
        words_in_sentence = 0;
        sentence_start = true;
      }
    }
    ++i;
  }
  if (words_in_sentence > 0) ++counts.sentences;
  if (counts.words == 0) {
    throw Error(Errc::EmptyText, "text contains no words");
  }
  return counts;
}

FogBreakdown gunning_fog(std::string_view text) {
  const TextCounts c = count_text(text);
  const double words = static_cast<double>(c.words);
  FogBreakdown out;
  out.words = c.words;
  out.sentences = c.sentences;
  out.complex_words = c.complex_words;
  out.index = 0.4 * (words / static_cast<double>(c.sentences) +
                     100.0 * static_cast<double>(c.complex_words) / words);
  return out;
}

double flesch_kincaid_grade(std::string_view text) {
  const TextCounts c = count_text(text);
  const double words = static_cast<double>(c.words);
  return 0.39 * (words / static_cast<double>(c.sentences)) +
         11.8 * (static_cast<double>(c.syllables) / words) - 15.59;
}

CogScore fog_to_score(double index) {
  const double raw = std::round(11.0 - index / 2.0);
  return CogScore(static_cast<int>(
      std::clamp(raw, double{CogScore::kMin}, double{CogScore::kMax})));
}

ScanResult scan_chunk(TagScanState state, std::string_view chunk) {
  ScanResult out;
  std::string buf = std::move(state.pending);
  state.pending.clear();
  out.display.reserve(chunk.size() + buf.size());

  // Feed characters through a small matcher. On a failed match the leading
  // '<' is released and the remainder re-examined, since it may itself start
  // a tag ("<<3>").
  std::string work = std::move(buf);
  work.append(chunk);
  std::size_t i = 0;
  std::string cand;
  while (i < work.size()) {
    const char c = work[i];
    if (cand.empty()) {
      if (c == '<') {
        cand.push_back(c);
      } else {
        out.display.push_back(c);
      }
      ++i;
      continue;
    }
    cand.push_back(c);
    if (auto v = complete_tag(cand)) {
      CogScore s(*v);
      out.scores.push_back(s);
      state.last_score = s;
      cand.clear();
      ++i;
    } else if (is_tag_prefix(cand)) {
      ++i;
    } else {
      out.display.push_back('<');
      // Re-scan everything after the released '<'.
      i -= cand.size() - 2;
      cand.clear();
    }
  }
  state.pending = std::move(cand);
  out.state = std::move(state);
  return out;
}

std::string finish_scan(TagScanState& state) {
  std::string rest = std::move(state.pending);
  state.pending.clear();
  return rest;
}

ScanResult strip_tags(std::string_view text) {
  ScanResult r = scan_chunk(TagScanState{}, text);
  r.display += finish_scan(r.state);
  return r;
}

}  // namespace cogstream::cogload
