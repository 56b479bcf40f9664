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

#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "subfuse/error.hpp"
#include "subfuse/eval.hpp"

using namespace subfuse;
using testing::seg;

TEST_CASE("character error rate") {
  CHECK(cer("今天天气", "今天天气") == 0.0);
  CHECK(cer("abcd", "abed") == doctest::Approx(0.25));
  CHECK(cer("ab", "") == 1.0);
  CHECK(cer("  abc \n", "abc") == 0.0);
  CHECK(cer("abc", " abd  ") == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(cer("   ", "x"), Error);
}

TEST_CASE("timeline text joins in start order") {
  const Timeline t{"v", {seg(2000, 3000, "后"), seg(0, 1000, "前")}};
  CHECK(timeline_text(t) == "前后");
}

TEST_CASE("corpus evaluation") {
  std::map<std::string, Timeline> refs = {{"a", Timeline{"a", {seg(0, 1000, "abcd")}}},
                                          {"b", Timeline{"b", {seg(0, 1000, "efgh")}}}};
  EvalReport r = eval_timelines(refs, refs);
  CHECK(r.aggregate_cer == 0.0);

  std::map<std::string, Timeline> hyps = refs;
  hyps["b"].segments[0].text = "wxyz";
  r = eval_timelines(refs, hyps);
  CHECK(r.aggregate_cer == doctest::Approx(0.5));
  REQUIRE(r.per_video.size() == 2);
  CHECK(r.per_video[1].edits == 4);
  CHECK(r.per_video[1].ref_chars == 4);

  hyps["b"].segments.clear();
  r = eval_timelines(refs, hyps);
  CHECK(r.per_video[1].cer == 1.0);

  hyps.erase("b");
  CHECK(eval_timelines(refs, hyps).per_video[1].cer == 1.0);

  hyps["zzz"] = Timeline{"zzz", {}};
  CHECK_THROWS_AS(eval_timelines(refs, hyps), Error);
}

TEST_CASE("pooled versus macro") {
  std::map<std::string, Timeline> refs = {{"a", Timeline{"a", {seg(0, 1, "ab")}}},
                                          {"b", Timeline{"b", {seg(0, 1, "cdefghij")}}}};
  std::map<std::string, Timeline> hyps = {{"a", Timeline{"a", {seg(0, 1, "xb")}}},
                                          {"b", Timeline{"b", {seg(0, 1, "cdefghij")}}}};
  CHECK(eval_timelines(refs, hyps).aggregate_cer == doctest::Approx(0.1));
  CHECK(eval_timelines(refs, hyps, Aggregation::kMacro).aggregate_cer == doctest::Approx(0.25));
}

TEST_CASE("pooled aggregate lies within the per-video range") {
  std::mt19937 rng(8);
  const std::string alphabet = "abcdef";
  auto random_text = [&](size_t min_len) {
    std::string s(min_len + rng() % 8, 'a');
    for (char& c : s) c = alphabet[rng() % alphabet.size()];
    return s;
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, Timeline> refs, hyps;
    for (int v = 0; v < 4; ++v) {
      const std::string id = "v" + std::to_string(v);
      refs[id] = Timeline{id, {seg(0, 1, random_text(1))}};
      hyps[id] = Timeline{id, {seg(0, 1, random_text(0))}};
    }
    const EvalReport r = eval_timelines(refs, hyps);
    double lo = 1e9, hi = -1e9;
    for (const VideoScore& s : r.per_video) {
      lo = std::min(lo, s.cer);
      hi = std::max(hi, s.cer);
    }
    CHECK(r.aggregate_cer >= lo - 1e-12);
    CHECK(r.aggregate_cer <= hi + 1e-12);
  }
}

TEST_CASE("report rendering") {
  std::map<std::string, Timeline> refs = {{"a", Timeline{"a", {seg(0, 1, "abcd")}}}};
  const EvalReport r = eval_timelines(refs, refs);
  CHECK(r.to_json().find("\"aggregate_cer\"") != std::string::npos);
  CHECK(r.to_table().find("pooled") != std::string::npos);
}
