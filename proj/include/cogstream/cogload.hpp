#pragma once

// Text-side cognitive load estimation: readability indices, the fog-to-score
// mapping, and the incremental scanner that pulls `<n>` load tags out of a
// streamed response.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogstream::cogload {

// Cognitive load score in 1..10; 1 is the hardest content.
class CogScore {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 10;
  // Score assumed for a tagged stream before its first tag.
  static constexpr int kNeutral = 5;

  // Throws Error{BadInput} outside 1..10.
  explicit CogScore(int value);

  int value() const noexcept { return value_; }

  friend auto operator<=>(const CogScore&, const CogScore&) = default;

 private:
  int value_;
};

struct FogBreakdown {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t complex_words = 0;
  double index = 0.0;
};

// Raw counts shared by every readability formula here.
struct TextCounts {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t complex_words = 0;
  std::size_t syllables = 0;
};

// Vowel-group syllable heuristic on a single word (case-insensitive).
int count_syllables(std::string_view word);

// Tokenizes and counts. Throws Error{EmptyText} when there are no words.
TextCounts count_text(std::string_view text);

FogBreakdown gunning_fog(std::string_view text);
double flesch_kincaid_grade(std::string_view text);

// clamp(round(11 - index / 2), 1, 10)
CogScore fog_to_score(double index);

struct TagScanState {
  // Unconsumed suffix that may still complete into a tag, e.g. "<1".
  std::string pending;
  std::optional<CogScore> last_score;
};

struct ScanResult {
  std::string display;
  std::vector<CogScore> scores;
  TagScanState state;
};

// Strips `<1>`..`<10>` tags from a chunk of streamed text. Tags split across
// chunk boundaries are carried in state.pending; everything else passes
// through untouched.
ScanResult scan_chunk(TagScanState state, std::string_view chunk);

// Releases any pending partial tag as plain text at end of stream.
std::string finish_scan(TagScanState& state);

// Whole-text convenience: scan in one chunk and flush.
ScanResult strip_tags(std::string_view text);

}  // namespace cogstream::cogload
