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
#include "subfuse/lm.hpp"
#include "subfuse/utf8.hpp"

using namespace subfuse;

namespace {

std::vector<std::string> lines(std::initializer_list<const char*> l) { return {l.begin(), l.end()}; }

std::string random_text(std::mt19937& rng, const std::u32string& alphabet) {
  std::u32string s(1 + rng() % 10, U' ');
  for (char32_t& c : s) c = alphabet[rng() % alphabet.size()];
  return utf8_encode(s);
}

double token_sum(const NGramModel& m, std::u32string_view text, size_t from) {
  double total = 0.0;
  for (size_t i = from; i < text.size(); ++i) total += m.log10_prob(text.substr(0, i), text[i]);
  return total;
}

}  // namespace

TEST_CASE("maximum likelihood estimates") {
  const NGramModel uni = train_lm(lines({"aab"}), 1);
  CHECK(uni.log10_prob(U"", U'a') == doctest::Approx(std::log10(2.0 / 3.0)));
  CHECK(uni.log10_prob(U"", U'b') == doctest::Approx(std::log10(1.0 / 3.0)));
  CHECK(uni.vocab_size() == 2);

  const NGramModel bi = train_lm(lines({"ab", "ab"}), 2);
  CHECK(bi.log10_prob(U"a", U'b') == doctest::Approx(0.0));
  CHECK(train_lm(lines({"他们 他们", "你们"}), 1).vocab_size() == 3);
}

TEST_CASE("scores") {
  const NGramModel m = train_lm(lines({"aab"}), 1);
  CHECK(score_text(m, "ab") == doctest::Approx(-0.3266).epsilon(1e-4));
  CHECK(score_text(train_lm(lines({"aaa"}), 1), "a") == doctest::Approx(0.0));
  CHECK(score_text(m, "c") == doctest::Approx(std::log10(0.4 / 3.0)));
  CHECK(score_text(m, "c") == doctest::Approx(-0.875).epsilon(1e-3));
}

TEST_CASE("backoff multiplies alpha per level") {
  const NGramModel m = train_lm(lines({"ab", "cb"}), 2);
  // "ab" unseen after context "c"? "cb" seen; try unseen bigram "ba".
  CHECK(m.log10_prob(U"b", U'a') == doctest::Approx(std::log10(0.4) + std::log10(1.0 / 4.0)));
  const NGramModel tri = train_lm(lines({"abc"}), 3);
  CHECK(tri.log10_prob(U"xa", U'b') == doctest::Approx(std::log10(0.4)));
  CHECK(tri.log10_prob(U"zz", U'q') == doctest::Approx(2 * std::log10(0.4) + std::log10(0.4 / 4.0)));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(train_lm(lines({" ", ""}), 3), Error);
  CHECK_THROWS_AS(train_lm(lines({"ab"}), 0), Error);
  const NGramModel m = train_lm(lines({"ab"}), 2);
  CHECK_THROWS_AS(score_text(m, "  "), Error);
  CHECK_THROWS_AS(write_arpa(NGramModel{}), Error);
}

TEST_CASE("dual scoring") {
  const NGramModel u = train_lm(lines({"今天天气不错", "我们去公园"}), 3);
  const NGramModel d = train_lm(lines({"感冒发烧要多喝水", "今天感冒了"}), 3);
  const std::string text = "今天感冒不错";
  CHECK(dual_score(u, d, {0.0, LmMix::kLinear}, text) == doctest::Approx(score_text(u, text)));
  CHECK(dual_score(u, d, {1.0, LmMix::kLinear}, text) == doctest::Approx(score_text(d, text)));
  CHECK(dual_score(u, u, {0.5, LmMix::kLinear}, text) == doctest::Approx(score_text(u, text)));
  CHECK(dual_score(u, u, {0.3, LmMix::kLogLinear}, text) == doctest::Approx(score_text(u, text)));
  const double mid = dual_score(u, d, {0.5, LmMix::kLinear}, text);
  CHECK(mid >= std::min(score_text(u, text), score_text(d, text)) - 1e-12);

  const DualLm only_u(&u, nullptr);
  CHECK(only_u.score(utf8_decode(text)) == doctest::Approx(score_text(u, text)));
  CHECK(DualLm(nullptr, nullptr).empty());
  CHECK_THROWS_AS((DualLmConfig{1.5, LmMix::kLinear}).validate(), Error);
}

TEST_CASE("arpa round trip") {
  std::mt19937 rng(11);
  const std::u32string alphabet = U"他它的是我你们好感冒xyz";
  std::vector<std::string> corpus;
  for (int i = 0; i < 60; ++i) corpus.push_back(random_text(rng, alphabet));
  const NGramModel m = train_lm(corpus, 4);
  const std::string arpa = write_arpa(m);
  CHECK(arpa.find("\\data\\") != std::string::npos);
  CHECK(arpa.find("ngram 1=") != std::string::npos);
  CHECK(arpa.find("\\4-grams:") != std::string::npos);
  CHECK(arpa.find("\\end\\") != std::string::npos);
  const NGramModel back = read_arpa(arpa);
  CHECK(back.order() == 4);
  CHECK(back.backoff_alpha() == m.backoff_alpha());
  for (int i = 0; i < 100; ++i) {
    const std::string t = random_text(rng, U"他它的是我你们好感冒xyzQ");
    CHECK(std::abs(score_text(back, t) - score_text(m, t)) <= 1e-9);
  }
  CHECK(write_arpa(back) == arpa);
}

TEST_CASE("arpa parse errors carry line numbers") {
  const std::string arpa = write_arpa(train_lm(lines({"ab"}), 2));
  const std::string truncated = arpa.substr(0, arpa.find("\\end\\"));
  try {
    read_arpa(truncated);
    FAIL("missing end marker accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
  }
  std::string bad = arpa;
  bad.replace(bad.find("\\2-grams:"), 9, "\\7-grams:");
  try {
    read_arpa(bad);
    FAIL("bad section accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("scores depend only on the last order-1 tokens") {
  std::mt19937 rng(23);
  const std::u32string alphabet = U"abcde";
  std::vector<std::string> corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back(random_text(rng, alphabet));
  const NGramModel m = train_lm(corpus, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::u32string shared = utf8_decode(random_text(rng, alphabet)) + U"ab";
    const std::u32string tail = utf8_decode(random_text(rng, alphabet));
    const std::u32string p1 = utf8_decode(random_text(rng, alphabet)) + shared;
    const std::u32string p2 = utf8_decode(random_text(rng, alphabet)) + shared;
    CHECK(token_sum(m, p1 + tail, p1.size()) == doctest::Approx(token_sum(m, p2 + tail, p2.size())));
  }
}

TEST_CASE("more training evidence never lowers a conditional probability") {
  std::vector<std::string> corpus = {"abc", "abd", "xbc"};
  const NGramModel before = train_lm(corpus, 2);
  corpus.push_back("bc");
  const NGramModel after = train_lm(corpus, 2);
  CHECK(after.log10_prob(U"b", U'c') >= before.log10_prob(U"b", U'c'));
  CHECK(std::isfinite(after.log10_prob(U"q", U'z')));
}
