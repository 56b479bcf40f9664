// Copyright 2026  The subfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// String dynamic-programming kernels over Unicode code points: edit
// distance, longest common subsequence, Dice-over-LCS similarity at the
// character and syllable level, and windowed approximate matching.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subfuse {

// Levenshtein distance with unit costs.
size_t edit_distance(std::u32string_view a, std::u32string_view b);
size_t edit_distance_utf8(std::string_view a, std::string_view b);

template <typename T>
size_t lcs_length(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  return lcs_length<char32_t>(std::span<const char32_t>(a.data(), a.size()),
                              std::span<const char32_t>(b.data(), b.size()));
}

// 2 * common / (len_a + len_b); two empty sequences are identical (1.0).
inline double dice(size_t common, size_t len_a, size_t len_b) {
  if (len_a + len_b == 0) return 1.0;
  return 2.0 * static_cast<double>(common) / static_cast<double>(len_a + len_b);
}

double char_similarity(std::u32string_view a, std::u32string_view b);
double char_similarity_utf8(std::string_view a, std::string_view b);

// Maps single characters to toneless syllables ("他" -> "ta").
class SyllableTable {
 public:
  SyllableTable() = default;

  // Parses "char<TAB>syllable" lines; '#' starts a comment line. Throws
  // Error(kParse) with the line number on malformed rows.
  static SyllableTable parse(std::string_view tsv);
  // The table bundled with the library.
  static const SyllableTable& builtin();

  void insert(char32_t ch, std::string syllable);
  const std::string* find(char32_t ch) const;
  size_t size() const { return table_.size(); }

  // Other characters sharing ch's syllable, in code point order.
  std::vector<char32_t> homophones(char32_t ch) const;

 private:
  std::unordered_map<char32_t, std::string> table_;
  std::unordered_map<std::string, std::vector<char32_t>> by_syllable_;
};

// Characters absent from the table map to themselves (UTF-8 encoded) as
// pseudo-syllables.
std::vector<std::string> to_syllables(std::u32string_view text,
                                      const SyllableTable& table);

double syllable_similarity(std::u32string_view a, std::u32string_view b,
                           const SyllableTable& table);

struct WindowMatch {
  size_t start = 0;
  size_t length = 0;
  double score = 0.0;
};

// Best char_similarity between `needle` and any haystack window of the
// same length (a single clamped window when the haystack is shorter).
// Equal scores prefer the window with the smaller edit distance, then the
// smallest start index. An empty haystack yields {0, 0, 0.0}.
WindowMatch best_window_match(std::u32string_view needle,
                              std::u32string_view haystack);

}  // namespace subfuse
