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

#include "doctest.h"
#include "subfuse/config.hpp"
#include "subfuse/error.hpp"

using namespace subfuse;

TEST_CASE("defaults match the module defaults") {
  const PipelineConfig c;
  CHECK(c.tracker.gate_cost == 0.7);
  CHECK(c.tracker.max_gap_frames == 10);
  CHECK(c.extractor.image_score_threshold == 0.05);
  CHECK(c.fusion.theta_same == 0.8);
  CHECK(c.dual_lm.lambda_domain == 0.5);
  CHECK(c.decode.lm_weight == 0.3);
  CHECK(c.rescore_weight == 0.5);
  CHECK(c.lm_order == 4);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("load applies keys and skips comments") {
  PipelineConfig c;
  c.load("# tracker\ngate_cost = 0.5\n\n  max_gap_frames=4  \nposition_rule = false\nlm_mix = log_linear\n"
         "remove_lm_floor = -2.5\naggregation = macro\nlm_domain = /tmp/d.arpa\n");
  CHECK(c.tracker.gate_cost == 0.5);
  CHECK(c.tracker.max_gap_frames == 4);
  CHECK_FALSE(c.tracker.position_rule);
  CHECK(c.dual_lm.mix == LmMix::kLogLinear);
  REQUIRE(c.fusion.remove_lm_floor.has_value());
  CHECK(*c.fusion.remove_lm_floor == -2.5);
  CHECK(c.aggregation == Aggregation::kMacro);
  CHECK(c.lm_domain == "/tmp/d.arpa");
  CHECK(c.extractor.merge_similarity_threshold == 0.6);
}

TEST_CASE("unknown keys and bad values are rejected with line numbers") {
  PipelineConfig c;
  try {
    c.load("gate_cost = 0.5\nbogus = 1\n");
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(c.set("gate_cost", "abc"), Error);
  CHECK_THROWS_AS(c.set("max_gap_frames", "1.5"), Error);
  CHECK_THROWS_AS(c.set("position_rule", "maybe"), Error);
  CHECK_THROWS_AS(c.load("just words\n"), Error);
}

TEST_CASE("later assignments win") {
  PipelineConfig c;
  c.load("beam_width = 4\n");
  c.set("beam_width", "16");
  CHECK(c.decode.beam_width == 16);
}

TEST_CASE("validation catches out-of-range values") {
  PipelineConfig c;
  c.set("w_char", "0.9");
  CHECK_THROWS_AS(c.validate(), Error);
  c = PipelineConfig{};
  c.set("threads", "0");
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("dump round trips through load") {
  PipelineConfig c;
  c.set("theta_pad", "0.45");
  c.set("lm_universal", "u.arpa");
  PipelineConfig d;
  d.load(c.dump());
  CHECK(d.dump() == c.dump());
  CHECK(d.get("theta_pad") == "0.45");
  for (const std::string& k : PipelineConfig::keys()) CHECK_NOTHROW((void)c.get(k));
}
