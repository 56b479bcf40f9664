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

// Flat "key = value" configuration covering every tunable of the pipeline.
// Lines starting with '#' are comments; unknown keys are rejected.

#include <string>
#include <string_view>
#include <vector>

#include "subfuse/decoder.hpp"
#include "subfuse/eval.hpp"
#include "subfuse/extractor.hpp"
#include "subfuse/fusion.hpp"
#include "subfuse/lm.hpp"
#include "subfuse/tracker.hpp"

namespace subfuse {

struct PipelineConfig {
  TrackerParams tracker;
  ExtractorParams extractor;
  FusionConfig fusion;
  DualLmConfig dual_lm;
  DecodeOptions decode;
  double rescore_weight = 0.5;
  int lm_order = 4;
  double backoff_alpha = NGramModel::kDefaultAlpha;
  Aggregation aggregation = Aggregation::kPooled;
  int threads = 1;
  // Paths are resolved by the caller; the library itself never opens files.
  std::string syllable_table;
  std::string lm_universal;
  std::string lm_domain;

  // Throws Error(kValidation) for an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  // Applies every assignment in `text`; errors carry the line number.
  void load(std::string_view text);
  void validate() const;

  static const std::vector<std::string>& keys();
  std::string get(std::string_view key) const;
  std::string dump() const;
};

}  // namespace subfuse
