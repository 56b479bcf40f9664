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

// Deterministic synthetic corpora (OCR frames, ASR segments and the ground
// truth timeline) for end-to-end testing.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subfuse/model.hpp"
#include "subfuse/textsim.hpp"

namespace subfuse {

struct NoiseProfile {
  uint64_t seed = 0;
  // OCR misreads are drawn per subtitle character and then shown in a
  // random share of that subtitle's frames, as a real recognizer repeats
  // the same mistake on near-identical images.
  double char_sub_rate = 0.0;
  double char_homophone_rate = 0.0;
  double det_drop_rate = 0.0;
  double bg_text_rate = 0.0;
  double asr_sub_rate = 0.0;
  double merge_fault_rate = 0.0;

  void validate() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static NoiseProfile parse_json(std::string_view document);
};

struct SynthOptions {
  int fps = 10;
  int frame_width = 1280;
  int frame_height = 720;
};

struct SynthVideo {
  OcrVideo ocr;
  AsrTranscript asr;
  Timeline truth;
};

SynthVideo generate_corpus(const std::string& video_id,
                           std::span<const std::string> truth_lines,
                           const NoiseProfile& profile,
                           const SynthOptions& options = {},
                           const SyllableTable& table = SyllableTable::builtin());

// Non-comment lines of data/sentences.txt.
std::vector<std::string> builtin_sentences();
std::vector<std::string> parse_sentence_pool(std::string_view text);

// Builds per-video scripts from a sentence pool. With probability
// `followup_rate` a line is followed by a close rewrite of itself (the
// kind of near-repeat that visual merging confuses).
std::vector<std::vector<std::string>> make_scripts(
    uint64_t seed, size_t n_videos, size_t lines_per_video,
    std::span<const std::string> pool, double followup_rate = 0.3,
    const SyllableTable& table = SyllableTable::builtin());

struct SynthCorpus {
  std::vector<SynthVideo> videos;

  Batch<OcrVideo> ocr_batch() const;
  Batch<AsrTranscript> asr_batch() const;
  Batch<Timeline> truth_batch() const;
};

SynthCorpus generate_dataset(std::span<const std::string> pool, size_t n_videos,
                             size_t lines_per_video, const NoiseProfile& profile,
                             const SynthOptions& options = {},
                             const SyllableTable& table = SyllableTable::builtin());

}  // namespace subfuse
