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

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "subfuse/model.hpp"

namespace subfuse {

// Character error rate of `hyp` against `ref`, both stripped of leading and
// trailing whitespace. Throws Error(kValidation) for an empty reference.
double cer(std::string_view ref, std::string_view hyp);

enum class Aggregation { kPooled, kMacro };

struct VideoScore {
  std::string video_id;
  size_t edits = 0;
  size_t ref_chars = 0;
  double cer = 0.0;
};

struct EvalReport {
  std::vector<VideoScore> per_video;
  double aggregate_cer = 0.0;
  Aggregation aggregation = Aggregation::kPooled;

  std::string to_json() const;
  std::string to_table() const;
};

// Segment texts joined in start order, no separator.
std::string timeline_text(const Timeline& timeline);

// Scores every reference video; a video missing from `hyps` counts as an
// empty hypothesis. Hypotheses for unknown videos are an error.
EvalReport eval_timelines(const std::map<std::string, Timeline>& refs,
                          const std::map<std::string, Timeline>& hyps,
                          Aggregation aggregation = Aggregation::kPooled);

}  // namespace subfuse
