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

#include <cmath>
#include <random>

#include "doctest.h"
#include "subfuse/error.hpp"
#include "subfuse/textsim.hpp"
#include "subfuse/utf8.hpp"

using namespace subfuse;

namespace {

std::u32string u(std::string_view s) { return utf8_decode(s); }

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::u32string random_string(std::mt19937& rng, size_t max_len, char32_t alphabet) {
  std::u32string s(rng() % (max_len + 1), U'a');
  for (char32_t& c : s) c = U'a' + static_cast<char32_t>(rng() % alphabet);
  return s;
}

}  // namespace

TEST_CASE("edit distance") {
  CHECK(edit_distance(U"", U"abc") == 3);
  CHECK(edit_distance(U"abc", U"abc") == 0);
  CHECK(edit_distance(U"kitten", U"sitting") == 3);
  CHECK(edit_distance_utf8("其他", "其它") == 1);
}

TEST_CASE("longest common subsequence") {
  CHECK(lcs_length(U"hello", U"hello") == 5);
  CHECK(lcs_length(U"abc", U"def") == 0);
  CHECK(lcs_length(U"abcbdab", U"bdcaba") == 4);
}

TEST_CASE("character similarity") {
  CHECK(char_similarity(U"", U"") == 1.0);
  CHECK(char_similarity(U"abc", U"") == 0.0);
  CHECK(char_similarity(U"same", U"same") == 1.0);
  const double a = char_similarity(u("比如说感冒的其他的病毒感染"), u("比如说感冒的其它的病毒感染"));
  CHECK(a == doctest::Approx(24.0 / 26.0));
  CHECK(round2(a) == doctest::Approx(0.92));
  const double b = char_similarity(u("但是如果是无中生有的度"), u("但是如果是无中生有的杜撰"));
  CHECK(b == doctest::Approx(20.0 / 23.0));
  CHECK(round2(b) == doctest::Approx(0.87));
}

TEST_CASE("syllables") {
  SyllableTable t;
  t.insert(U'他', "ta");
  CHECK(to_syllables(u("他"), t) == std::vector<std::string>{"ta"});
  CHECK(to_syllables(u("a他"), t) == std::vector<std::string>{"a", "ta"});
  CHECK(to_syllables(U"", t).empty());
}

TEST_CASE("syllable similarity with the bundled table") {
  const SyllableTable& t = SyllableTable::builtin();
  const double a = syllable_similarity(u("比如说感冒的其他的病毒感染"), u("比如说感冒的其它的病毒感染"), t);
  CHECK(a == doctest::Approx(1.0));
  const double b = syllable_similarity(u("但是如果是无中生有的度"), u("但是如果是无中生有的杜撰"), t);
  CHECK(b == doctest::Approx(22.0 / 23.0));
  CHECK(round2(b) == doctest::Approx(0.96));
  CHECK(syllable_similarity(u("你好"), u("你好"), t) == 1.0);
}

TEST_CASE("syllable table parsing") {
  const SyllableTable t = SyllableTable::parse("# comment\n他\tta\n它\tta\n\n度\tdu\n");
  CHECK(t.size() == 3);
  REQUIRE(t.find(U'它') != nullptr);
  CHECK(*t.find(U'它') == "ta");
  CHECK(t.homophones(U'他') == std::vector<char32_t>{U'它'});
  CHECK(t.homophones(U'度').empty());
  CHECK_THROWS_AS(SyllableTable::parse("他ta\n"), Error);
  CHECK_THROWS_AS(SyllableTable::parse("他\tTA\n"), Error);
  CHECK_THROWS_AS(SyllableTable::parse("他们\tta\n"), Error);
}

TEST_CASE("bundled table covers homophone pairs") {
  const SyllableTable& t = SyllableTable::builtin();
  REQUIRE(t.find(U'杜') != nullptr);
  CHECK(*t.find(U'杜') == "du");
  CHECK(*t.find(U'度') == "du");
  CHECK(*t.find(U'它') == "ta");
}

TEST_CASE("best window match") {
  WindowMatch m = best_window_match(U"bcd", U"abcde");
  CHECK(m.start == 1);
  CHECK(m.score == 1.0);
  m = best_window_match(U"xy", U"ab");
  CHECK(m.start == 0);
  CHECK(m.score == 0.0);
  m = best_window_match(U"abd", U"zzabcz");
  CHECK(m.start == 2);
  CHECK(m.score == doctest::Approx(2.0 / 3.0));
  m = best_window_match(U"abc", U"");
  CHECK(m.start == 0);
  CHECK(m.score == 0.0);
  m = best_window_match(U"abcdef", U"abc");
  CHECK(m.start == 0);
  CHECK(m.score == doctest::Approx(6.0 / 9.0));
}

TEST_CASE("similarity properties on random strings") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::u32string a = random_string(rng, 8, 4);
    const std::u32string b = random_string(rng, 8, 4);
    const std::u32string c = random_string(rng, 8, 4);
    const double s = char_similarity(a, b);
    CHECK(s == char_similarity(b, a));
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK((s == 1.0) == (a == b));
    const size_t lcs = lcs_length(a, b);
    CHECK(a.size() + b.size() - 2 * lcs <= 2 * edit_distance(a, b));
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
  }
}
