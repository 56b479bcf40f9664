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

#include "subfuse/textsim.hpp"

#include <algorithm>
#include <numeric>

#include "subfuse/embedded_data.hpp"
#include "subfuse/error.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      const size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

size_t edit_distance_utf8(std::string_view a, std::string_view b) {
  return edit_distance(utf8_decode(a), utf8_decode(b));
}

double char_similarity(std::u32string_view a, std::u32string_view b) {
  return dice(lcs_length(a, b), a.size(), b.size());
}

double char_similarity_utf8(std::string_view a, std::string_view b) {
  return char_similarity(utf8_decode(a), utf8_decode(b));
}

SyllableTable SyllableTable::parse(std::string_view tsv) {
  SyllableTable table;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= tsv.size()) {
    size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::u32string cps = strip(utf8_decode(line));
    if (cps.empty() || cps.front() == U'#') {
      if (end == tsv.size()) break;
      continue;
    }
    const size_t tab = cps.find(U'\t');
    const std::string where = "syllable table line " + std::to_string(line_no);
    if (tab == std::u32string::npos) fail_parse(where + ": expected char<TAB>syllable");
    const std::u32string key = strip(cps.substr(0, tab));
    const std::u32string value = strip(cps.substr(tab + 1));
    if (key.size() != 1) fail_parse(where + ": key must be a single character");
    if (value.empty()) fail_parse(where + ": empty syllable");
    for (char32_t c : value) {
      if (c < U'a' || c > U'z') fail_parse(where + ": syllable must be lowercase ASCII");
    }
    table.insert(key.front(), utf8_encode(value));
    if (end == tsv.size()) break;
  }
  return table;
}

const SyllableTable& SyllableTable::builtin() {
  static const SyllableTable table = parse(embedded::syllables_tsv());
  return table;
}

void SyllableTable::insert(char32_t ch, std::string syllable) {
  auto it = table_.find(ch);
  if (it != table_.end()) {
    auto& old = by_syllable_[it->second];
    old.erase(std::remove(old.begin(), old.end(), ch), old.end());
  }
  auto& bucket = by_syllable_[syllable];
  bucket.insert(std::upper_bound(bucket.begin(), bucket.end(), ch), ch);
  table_[ch] = std::move(syllable);
}

const std::string* SyllableTable::find(char32_t ch) const {
  auto it = table_.find(ch);
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<char32_t> SyllableTable::homophones(char32_t ch) const {
  std::vector<char32_t> out;
  const std::string* syl = find(ch);
  if (syl == nullptr) return out;
  for (char32_t other : by_syllable_.at(*syl)) {
    if (other != ch) out.push_back(other);
  }
  return out;
}

std::vector<std::string> to_syllables(std::u32string_view text,
                                      const SyllableTable& table) {
  std::vector<std::string> out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (const std::string* syl = table.find(c)) {
      out.push_back(*syl);
    } else {
      std::string self;
      utf8_append(self, c);
      out.push_back(std::move(self));
    }
  }
  return out;
}

double syllable_similarity(std::u32string_view a, std::u32string_view b,
                           const SyllableTable& table) {
  const auto sa = to_syllables(a, table);
  const auto sb = to_syllables(b, table);
  return dice(lcs_length<std::string>(sa, sb), sa.size(), sb.size());
}

WindowMatch best_window_match(std::u32string_view needle,
                              std::u32string_view haystack) {
  WindowMatch best;
  if (haystack.empty() || needle.empty()) return best;
  const size_t len = std::min(needle.size(), haystack.size());
  const size_t last = haystack.size() - len;
  size_t best_edits = 0;
  bool have = false;
  for (size_t start = 0; start <= last; ++start) {
    const std::u32string_view window = haystack.substr(start, len);
    const double score = char_similarity(needle, window);
    if (have && score < best.score) continue;
    const size_t edits = edit_distance(needle, window);
    if (!have || score > best.score || edits < best_edits) {
      best = WindowMatch{start, len, score};
      best_edits = edits;
      have = true;
    }
  }
  return best;
}

}  // namespace subfuse
