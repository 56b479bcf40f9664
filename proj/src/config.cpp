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

#include "subfuse/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>

#include "subfuse/error.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {
namespace {

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    fail_validation("config key \"" + std::string(key) + "\": expected a number, got \"" + std::string(v) + "\"");
  }
  return out;
}

long long parse_integer(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    fail_validation("config key \"" + std::string(key) + "\": expected an integer, got \"" + std::string(v) + "\"");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail_validation("config key \"" + std::string(key) + "\": expected true or false, got \"" + std::string(v) + "\"");
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, r.ptr};
}

struct Field {
  std::function<void(PipelineConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
Field real_field(T PipelineConfig::*group, double T::*member) {
  return {[=](PipelineConfig& c, std::string_view k, std::string_view v) { (c.*group).*member = parse_real(k, v); },
          [=](const PipelineConfig& c) { return fmt((c.*group).*member); }};
}

template <typename T, typename I>
Field int_field(T PipelineConfig::*group, I T::*member) {
  return {[=](PipelineConfig& c, std::string_view k, std::string_view v) {
            const long long n = parse_integer(k, v);
            if (n < 0) fail_validation("config key \"" + std::string(k) + "\" must not be negative");
            (c.*group).*member = static_cast<I>(n);
          },
          [=](const PipelineConfig& c) { return std::to_string((c.*group).*member); }};
}

Field string_field(std::string PipelineConfig::*member) {
  return {[=](PipelineConfig& c, std::string_view, std::string_view v) { c.*member = std::string(v); },
          [=](const PipelineConfig& c) { return c.*member; }};
}

const std::map<std::string, Field, std::less<>>& registry() {
  using C = PipelineConfig;
  static const std::map<std::string, Field, std::less<>> fields = {
      {"gate_cost", real_field(&C::tracker, &TrackerParams::gate_cost)},
      {"max_gap_frames", int_field(&C::tracker, &TrackerParams::max_gap_frames)},
      {"band_count", int_field(&C::tracker, &TrackerParams::band_count)},
      {"min_band_fraction", real_field(&C::tracker, &TrackerParams::min_band_fraction)},
      {"position_rule",
       {[](C& c, std::string_view k, std::string_view v) { c.tracker.position_rule = parse_bool(k, v); },
        [](const C& c) { return std::string(c.tracker.position_rule ? "true" : "false"); }}},
      {"image_score_threshold", real_field(&C::extractor, &ExtractorParams::image_score_threshold)},
      {"merge_similarity_threshold", real_field(&C::extractor, &ExtractorParams::merge_similarity_threshold)},
      {"min_track_frames", int_field(&C::extractor, &ExtractorParams::min_track_frames)},
      {"keep_threshold", real_field(&C::extractor, &ExtractorParams::keep_threshold)},
      {"frame_width", int_field(&C::extractor, &ExtractorParams::frame_width)},
      {"frame_height", int_field(&C::extractor, &ExtractorParams::frame_height)},
      {"theta_same", real_field(&C::fusion, &FusionConfig::theta_same)},
      {"theta_split", real_field(&C::fusion, &FusionConfig::theta_split)},
      {"theta_remove", real_field(&C::fusion, &FusionConfig::theta_remove)},
      {"theta_pad", real_field(&C::fusion, &FusionConfig::theta_pad)},
      {"w_char", real_field(&C::fusion, &FusionConfig::w_char)},
      {"w_syl", real_field(&C::fusion, &FusionConfig::w_syl)},
      {"w_lm", real_field(&C::fusion, &FusionConfig::w_lm)},
      {"overlap_slack_ms", int_field(&C::fusion, &FusionConfig::overlap_slack_ms)},
      {"remove_lm_floor",
       {[](C& c, std::string_view k, std::string_view v) {
          if (v == "none" || v.empty()) {
            c.fusion.remove_lm_floor.reset();
          } else {
            c.fusion.remove_lm_floor = parse_real(k, v);
          }
        },
        [](const C& c) { return c.fusion.remove_lm_floor ? fmt(*c.fusion.remove_lm_floor) : std::string("none"); }}},
      {"lambda_domain", real_field(&C::dual_lm, &DualLmConfig::lambda_domain)},
      {"lm_mix",
       {[](C& c, std::string_view k, std::string_view v) {
          if (v == "linear") {
            c.dual_lm.mix = LmMix::kLinear;
          } else if (v == "log_linear") {
            c.dual_lm.mix = LmMix::kLogLinear;
          } else {
            fail_validation("config key \"" + std::string(k) + "\": expected linear or log_linear");
          }
        },
        [](const C& c) { return std::string(c.dual_lm.mix == LmMix::kLinear ? "linear" : "log_linear"); }}},
      {"beam_width", int_field(&C::decode, &DecodeOptions::beam_width)},
      {"n_best", int_field(&C::decode, &DecodeOptions::n_best)},
      {"lm_weight", real_field(&C::decode, &DecodeOptions::lm_weight)},
      {"rescore_weight",
       {[](C& c, std::string_view k, std::string_view v) { c.rescore_weight = parse_real(k, v); },
        [](const C& c) { return fmt(c.rescore_weight); }}},
      {"lm_order",
       {[](C& c, std::string_view k, std::string_view v) { c.lm_order = static_cast<int>(parse_integer(k, v)); },
        [](const C& c) { return std::to_string(c.lm_order); }}},
      {"backoff_alpha",
       {[](C& c, std::string_view k, std::string_view v) { c.backoff_alpha = parse_real(k, v); },
        [](const C& c) { return fmt(c.backoff_alpha); }}},
      {"aggregation",
       {[](C& c, std::string_view k, std::string_view v) {
          if (v == "pooled") {
            c.aggregation = Aggregation::kPooled;
          } else if (v == "macro") {
            c.aggregation = Aggregation::kMacro;
          } else {
            fail_validation("config key \"" + std::string(k) + "\": expected pooled or macro");
          }
        },
        [](const C& c) { return std::string(c.aggregation == Aggregation::kPooled ? "pooled" : "macro"); }}},
      {"threads",
       {[](C& c, std::string_view k, std::string_view v) { c.threads = static_cast<int>(parse_integer(k, v)); },
        [](const C& c) { return std::to_string(c.threads); }}},
      {"syllable_table", string_field(&C::syllable_table)},
      {"lm_universal", string_field(&C::lm_universal)},
      {"lm_domain", string_field(&C::lm_domain)},
  };
  return fields;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  const auto it = registry().find(key);
  if (it == registry().end()) fail_validation("unknown config key \"" + std::string(key) + "\"");
  it->second.set(*this, key, value);
}

void PipelineConfig::load(std::string_view text) {
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = strip_utf8(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail_validation("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = strip_utf8(std::string_view(line).substr(0, eq));
    const std::string value = strip_utf8(std::string_view(line).substr(eq + 1));
    try {
      set(key, value);
    } catch (const Error& e) {
      fail_validation("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void PipelineConfig::validate() const {
  tracker.validate();
  fusion.validate();
  dual_lm.validate();
  decode.validate();
  extractor.validate();
  if (lm_order < 1) fail_validation("lm_order must be at least 1");
  if (!(backoff_alpha > 0.0 && backoff_alpha <= 1.0)) fail_validation("backoff_alpha must be in (0, 1]");
  if (threads < 1) fail_validation("threads must be at least 1");
}

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, f] : registry()) out.push_back(k);
    return out;
  }();
  return names;
}

std::string PipelineConfig::get(std::string_view key) const {
  const auto it = registry().find(key);
  if (it == registry().end()) fail_validation("unknown config key \"" + std::string(key) + "\"");
  return it->second.get(*this);
}

std::string PipelineConfig::dump() const {
  std::string out;
  for (const auto& [k, f] : registry()) out += k + " = " + f.get(*this) + "\n";
  return out;
}

}  // namespace subfuse
