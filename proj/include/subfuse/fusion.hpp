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

// Result-level fusion of the visual subtitle timeline with ASR output:
// split over-merged subtitles, pick the best candidate text, remove
// subtitles the audio contradicts, and pad subtitles only heard in audio.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subfuse/lm.hpp"
#include "subfuse/model.hpp"
#include "subfuse/textsim.hpp"

namespace subfuse {

struct FusionConfig {
  double theta_same = 0.8;
  double theta_split = 0.6;
  double theta_remove = 0.3;
  double theta_pad = 0.5;
  double w_char = 0.4;
  double w_syl = 0.4;
  double w_lm = 0.2;
  int64_t overlap_slack_ms = 500;
  // When set, the remover also drops subtitles whose LM score is below it.
  std::optional<double> remove_lm_floor;

  void validate() const;
};

// Concatenated text of ASR segments touching [start - slack, end + slack].
std::string asr_context(std::span<const AsrSegment> asr,
                        const SubtitleSegment& segment, int64_t slack_ms);

std::vector<SubtitleSegment> split_merged(const SubtitleSegment& segment,
                                          std::string_view context,
                                          const FusionConfig& config);

SubtitleSegment select_candidate(const SubtitleSegment& segment,
                                 std::string_view context, const DualLm& lms,
                                 const SyllableTable& table,
                                 const FusionConfig& config);

Timeline remove_nonsubtitles(const Timeline& timeline,
                             std::span<const AsrSegment> asr,
                             const SyllableTable& table,
                             const FusionConfig& config,
                             const DualLm* lms = nullptr);

// Fraction of `asr_text` found, in order, inside `subtitle`.
double containment(std::u32string_view asr_text, std::u32string_view subtitle);

std::vector<SubtitleSegment> pad_missing(std::span<const AsrSegment> asr,
                                         const Timeline& visual,
                                         const FusionConfig& config);

struct FusionAudit {
  std::string video_id;
  size_t input_segments = 0;
  size_t post_split_segments = 0;
  size_t split_added = 0;
  size_t relabeled = 0;
  size_t removed = 0;
  size_t padded = 0;
  size_t output_segments = 0;
};

struct FusionResult {
  Timeline timeline;
  FusionAudit audit;
};

FusionResult fuse(const Timeline& visual, std::span<const AsrSegment> asr,
                  const DualLm& lms, const SyllableTable& table,
                  const FusionConfig& config);

std::string write_audit_batch(std::span<const FusionAudit> audits, bool array_form);

}  // namespace subfuse
