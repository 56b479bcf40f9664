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

#include <map>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "subfuse/extractor.hpp"
#include "subfuse/fusion.hpp"
#include "subfuse/synth.hpp"
#include "subfuse/utf8.hpp"

using namespace subfuse;
using testing::seg;

namespace {

// A visual segment backed by the given per-frame texts, 100 ms apart.
SubtitleSegment observed(const std::vector<std::string>& frames, int64_t start = 0,
                         int64_t step = 100) {
  SubtitleSegment s;
  s.start_ms = start;
  s.end_ms = start + step * static_cast<int64_t>(frames.size() - 1);
  std::map<std::string, int> counts;
  for (size_t i = 0; i < frames.size(); ++i) {
    s.frames.push_back({start + step * static_cast<int64_t>(i), frames[i]});
    if (counts[frames[i]]++ == 0) s.candidates.push_back({frames[i], 0, 0.9});
  }
  for (Candidate& c : s.candidates) c.support = counts[c.text];
  s.text = s.candidates.front().text;
  return s;
}

std::vector<std::string> texts_of(const std::vector<SubtitleSegment>& segs) {
  std::vector<std::string> out;
  for (const SubtitleSegment& s : segs) out.push_back(s.text);
  return out;
}

AsrSegment asr(int64_t start, int64_t end, std::string text) {
  return AsrSegment{start, end, std::move(text), std::nullopt};
}

const DualLm kNoLm(nullptr, nullptr);

}  // namespace

TEST_CASE("asr context") {
  const std::vector<AsrSegment> a = {asr(0, 1000, "第一句"), asr(1000, 2000, "第二句"),
                                     asr(9000, 9500, "远处")};
  CHECK(asr_context(a, seg(100, 900, "x"), 0) == "第一句");
  CHECK(asr_context(a, seg(800, 1500, "x"), 0) == "第一句第二句");
  CHECK(asr_context(a, seg(4000, 5000, "x"), 500).empty());
  const std::vector<AsrSegment> reversed = {asr(1000, 2000, "后"), asr(0, 900, "前")};
  CHECK(asr_context(reversed, seg(0, 2000, "x"), 0) == "前后");
}

TEST_CASE("splitter: over-merged pair in display order") {
  const FusionConfig cfg;
  const SubtitleSegment s = observed({"他可能就是一个普通的感冒", "他可能就是一个普通的感冒",
                                      "有可能不是普通的感冒", "有可能不是普通的感冒"});
  const auto out = split_merged(
      s, "也不能讲他可能就是一个普通的感冒有可能不是普通的感冒有可能是一个", cfg);
  CHECK(texts_of(out) == std::vector<std::string>{"他可能就是一个普通的感冒", "有可能不是普通的感冒"});
  REQUIRE(out.size() == 2);
  CHECK(out[0].start_ms == 0);
  CHECK(out[0].end_ms == 200);
  CHECK(out[1].start_ms == 200);
  CHECK(out[1].end_ms == 300);
}

TEST_CASE("splitter: audio order governs") {
  const FusionConfig cfg;
  const SubtitleSegment s = observed({"你们俩都是二婚", "你们都是头婚吗"});
  const auto out = split_merged(s, "你们都是结婚你们俩都是二婚家庭", cfg);
  CHECK(texts_of(out) == std::vector<std::string>{"你们都是头婚吗", "你们俩都是二婚"});
}

TEST_CASE("splitter leaves single subtitles alone") {
  const FusionConfig cfg;
  const SubtitleSegment one = observed({"今天天气不错"});
  CHECK(split_merged(one, "今天天气不错", cfg) == std::vector<SubtitleSegment>{one});
  // Variants of one line form a single cluster.
  const SubtitleSegment variants = observed({"比如说感冒的其他的病毒感染", "比如说感冒的其它的病毒感染"});
  CHECK(split_merged(variants, "比如说感冒的其他的病毒感染", cfg).size() == 1);
  // Without audio evidence nothing is split.
  const SubtitleSegment two = observed({"你们俩都是二婚", "你们都是头婚吗"});
  CHECK(split_merged(two, "", cfg).size() == 1);
}

TEST_CASE("splitter falls back to a proportional split without frames") {
  const FusionConfig cfg;
  SubtitleSegment s = seg(0, 3000, "你们俩都是二婚");
  s.candidates = {{"你们俩都是二婚", 2, 0.9}, {"你们都是头婚吗", 1, 0.9}};
  const auto out = split_merged(s, "你们都是结婚你们俩都是二婚家庭", cfg);
  REQUIRE(out.size() == 2);
  CHECK(out[0].text == "你们都是头婚吗");
  CHECK(out[0].end_ms == 1000);
  CHECK(out[1].start_ms == 1000);
  CHECK(out[1].end_ms == 3000);
}

TEST_CASE("splitter preserves the parent's time coverage") {
  std::mt19937 rng(4);
  const FusionConfig cfg;
  const std::vector<std::string> lines = {"他可能就是一个普通的感冒", "有可能不是普通的感冒",
                                          "你们都是头婚吗", "你们俩都是二婚"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> frames(2 + rng() % 8);
    for (std::string& f : frames) f = lines[rng() % lines.size()];
    const SubtitleSegment s = observed(frames, 1000);
    const auto out = split_merged(s, "他可能就是一个普通的感冒有可能不是普通的感冒你们都是头婚吗你们俩都是二婚", cfg);
    REQUIRE_FALSE(out.empty());
    CHECK(out.front().start_ms == s.start_ms);
    CHECK(out.back().end_ms == s.end_ms);
    for (size_t i = 1; i < out.size(); ++i) CHECK(out[i].start_ms == out[i - 1].end_ms);
  }
}

TEST_CASE("candidate selection") {
  const FusionConfig cfg;
  const SyllableTable& table = SyllableTable::builtin();
  SubtitleSegment s = seg(0, 1000, "比如说感冒的其它的病毒感染");
  s.candidates = {{"比如说感冒的其它的病毒感染", 3, 0.9}, {"比如说感冒的其它的病毒感柒", 3, 0.9}};
  s.text = s.candidates[1].text;
  const NGramModel lm = train_lm(std::vector<std::string>{"比如说感冒的其他的病毒感染"}, 3);
  const DualLm dual(&lm, nullptr);
  const SubtitleSegment chosen = select_candidate(s, "比如说感冒的其他的病毒感染", dual, table, cfg);
  CHECK(chosen.text == "比如说感冒的其它的病毒感染");
  CHECK(chosen.source == SegmentSource::kFused);

  SubtitleSegment single = seg(0, 1000, "独一无二");
  single.candidates = {{"独一无二", 1, 0.5}};
  CHECK(select_candidate(single, "完全无关", kNoLm, table, cfg) == single);

  SubtitleSegment tie = seg(0, 1000, "b");
  tie.candidates = {{"b", 1, 0.5}, {"a", 1, 0.5}};
  CHECK(select_candidate(tie, "", kNoLm, table, cfg).text == "a");
  tie.candidates = {{"b", 2, 0.5}, {"a", 1, 0.5}};
  CHECK(select_candidate(tie, "", kNoLm, table, cfg).text == "b");
  tie.candidates = {{"b", 1, 0.5}, {"a", 1, 0.7}};
  CHECK(select_candidate(tie, "", kNoLm, table, cfg).text == "a");
}

TEST_CASE("remover") {
  const FusionConfig cfg;
  const SyllableTable& table = SyllableTable::builtin();
  const std::vector<AsrSegment> a = {asr(0, 2000, "你们都是结婚你们俩都是二婚家庭")};
  Timeline t{"v", {seg(0, 1000, "购买链接见评论区"), seg(1000, 2000, "你们俩都是二婚"),
                   seg(8000, 9000, "没有声音的字幕")}};
  const Timeline kept = remove_nonsubtitles(t, a, table, cfg);
  CHECK(texts_of(kept.segments) == std::vector<std::string>{"你们俩都是二婚", "没有声音的字幕"});
}

TEST_CASE("remover lm floor is opt-in") {
  FusionConfig cfg;
  const NGramModel lm = train_lm(std::vector<std::string>{"你们俩都是二婚"}, 2);
  const DualLm dual(&lm, nullptr);
  const Timeline t{"v", {seg(0, 1000, "乱码乱码")}};
  CHECK(remove_nonsubtitles(t, {}, SyllableTable::builtin(), cfg, &dual).segments.size() == 1);
  cfg.remove_lm_floor = -1.0;
  CHECK(remove_nonsubtitles(t, {}, SyllableTable::builtin(), cfg, &dual).segments.empty());
}

TEST_CASE("padder decisions") {
  const FusionConfig cfg;
  struct Row {
    const char* heard;
    const char* next;
    bool pad;
    double containment;
  };
  const Row rows[] = {
      {"到现在", "到现在为止你大概借给她多少钱", false, 1.0},
      {"都会说一些", "她会讲一些很难听的话", false, 0.6},
      {"我来跟你说几句", "我来跟您说几句哥哥", false, 6.0 / 7.0},
      {"机会我不是没给你", "我讲得很清楚", true, 0.125},
      {"你们好欢迎陈曦大家好", "陪妈妈们学习为妈妈们服务", true, 0.1},
      {"陈勇鹏安徽中医药大学第一附属医院儿科副主任医师", "从事儿科临床教学工作二十余年", true, 2.0 / 23.0},
  };
  for (const Row& r : rows) {
    CAPTURE(r.heard);
    CHECK(containment(utf8_decode(r.heard), utf8_decode(r.next)) == doctest::Approx(r.containment));
    const Timeline visual{"v", {seg(3000, 5000, r.next)}};
    const auto pads = pad_missing(std::vector<AsrSegment>{asr(0, 2000, r.heard)}, visual, cfg);
    CHECK(pads.size() == (r.pad ? 1u : 0u));
    if (r.pad) {
      CHECK(pads[0].text == r.heard);
      CHECK(pads[0].source == SegmentSource::kAudioPad);
      CHECK(pads[0].start_ms == 0);
      CHECK(pads[0].end_ms == 2000);
    }
  }
  CHECK(pad_missing(std::vector<AsrSegment>{asr(0, 1000, "最后一句")}, Timeline{"v", {}}, cfg).size() == 1);
  // Covered by an overlapping subtitle: nothing to pad.
  const Timeline covering{"v", {seg(0, 2000, "完全不同的内容")}};
  CHECK(pad_missing(std::vector<AsrSegment>{asr(0, 2000, "机会我不是没给你")}, covering, cfg).empty());
}

TEST_CASE("fuse fixpoint on agreeing inputs") {
  const FusionConfig cfg;
  Timeline visual{"v", {}};
  std::vector<AsrSegment> heard;
  const std::vector<std::string> lines = {"今天天气不错", "我们去公园散步吧", "好的"};
  for (size_t i = 0; i < lines.size(); ++i) {
    SubtitleSegment s = seg(static_cast<int64_t>(i) * 3000, static_cast<int64_t>(i) * 3000 + 2000, lines[i]);
    s.candidates = {{lines[i], 20, 0.9}};
    visual.segments.push_back(s);
    heard.push_back(asr(s.start_ms, s.end_ms, lines[i]));
  }
  const FusionResult r = fuse(visual, heard, kNoLm, SyllableTable::builtin(), cfg);
  CHECK(r.timeline == visual);
  CHECK(r.audit.split_added == 0);
  CHECK(r.audit.relabeled == 0);
  CHECK(r.audit.removed == 0);
  CHECK(r.audit.padded == 0);
}

TEST_CASE("fuse with an empty visual timeline pads every segment") {
  const std::vector<AsrSegment> heard = {asr(0, 1000, "一"), asr(2000, 3000, "二"), asr(4000, 5000, "三")};
  const FusionResult r = fuse(Timeline{"v", {}}, heard, kNoLm, SyllableTable::builtin(), FusionConfig{});
  REQUIRE(r.timeline.segments.size() == 3);
  for (const SubtitleSegment& s : r.timeline.segments) CHECK(s.source == SegmentSource::kAudioPad);
  CHECK(r.audit.padded == 3);
}

TEST_CASE("fuse splits an over-merged subtitle in audio order") {
  SubtitleSegment s = observed({"你们俩都是二婚", "你们俩都是二婚", "你们都是头婚吗", "你们都是头婚吗"}, 0, 1000);
  const std::vector<AsrSegment> heard = {asr(0, 3000, "你们都是结婚你们俩都是二婚家庭")};
  const FusionResult r = fuse(Timeline{"v", {s}}, heard, kNoLm, SyllableTable::builtin(), FusionConfig{});
  CHECK(texts_of(r.timeline.segments) == std::vector<std::string>{"你们都是头婚吗", "你们俩都是二婚"});
  CHECK(r.audit.split_added == 1);
  CHECK(r.audit.padded == 0);
  REQUIRE(r.timeline.segments.size() == 2);
  // Display order contradicts audio order, so the span is split by support.
  CHECK(r.timeline.segments[0].end_ms == 1500);
  CHECK(r.timeline.segments[1].start_ms == 1500);
}

TEST_CASE("fuse invariants on noisy synthetic videos") {
  NoiseProfile p;
  p.seed = 99;
  p.char_sub_rate = 0.05;
  p.char_homophone_rate = 0.05;
  p.bg_text_rate = 0.3;
  p.merge_fault_rate = 0.2;
  p.asr_sub_rate = 0.05;
  p.det_drop_rate = 0.2;
  const auto corpus = generate_dataset(builtin_sentences(), 6, 20, p);
  const FusionConfig cfg;
  for (const SynthVideo& v : corpus.videos) {
    Timeline visual = build_visual_timeline(v.ocr, {}, {});
    // Drop a few subtitles so the padder has work.
    for (size_t i = visual.segments.size(); i-- > 0;) {
      if (i % 5 == 2) visual.segments.erase(visual.segments.begin() + static_cast<long>(i));
    }
    const FusionResult r = fuse(visual, v.asr.segments, kNoLm, SyllableTable::builtin(), cfg);
    CHECK_NOTHROW(validate_timeline(r.timeline));
    CHECK(r.audit.output_segments == r.audit.post_split_segments - r.audit.removed + r.audit.padded);
    CHECK(r.audit.output_segments == r.timeline.segments.size());
    CHECK(r.audit.padded > 0);
    for (const SubtitleSegment& pad : r.timeline.segments) {
      if (pad.source != SegmentSource::kAudioPad) continue;
      for (const SubtitleSegment& s : r.timeline.segments) {
        if (s.source == SegmentSource::kAudioPad) continue;
        const int64_t overlap = std::min(pad.end_ms, s.end_ms) - std::max(pad.start_ms, s.start_ms);
        CHECK(overlap <= cfg.overlap_slack_ms);
      }
    }
    const FusionResult again = fuse(visual, v.asr.segments, kNoLm, SyllableTable::builtin(), cfg);
    CHECK(write_timeline(again.timeline) == write_timeline(r.timeline));
  }
}

TEST_CASE("fusion config validation") {
  FusionConfig cfg;
  cfg.w_lm = 0.5;
  CHECK_THROWS(cfg.validate());
  cfg = FusionConfig{};
  cfg.theta_pad = -0.1;
  CHECK_THROWS(cfg.validate());
}
