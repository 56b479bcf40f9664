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

// Batch orchestration of the pipeline stages over whole documents. Videos
// run in parallel; each video's processing is sequential and results are
// collected in input order, so output never depends on the thread count.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "subfuse/config.hpp"
#include "subfuse/decoder.hpp"
#include "subfuse/eval.hpp"
#include "subfuse/fusion.hpp"
#include "subfuse/model.hpp"
#include "subfuse/synth.hpp"
#include "subfuse/tracker.hpp"

namespace subfuse {

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first failure
// (lowest index) is rethrown after all workers finish.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

struct VideoTracks {
  std::string video_id;
  std::vector<TextTrack> tracks;
};

std::vector<VideoTracks> track_batch(const Batch<OcrVideo>& ocr, const PipelineConfig& config);
std::string write_tracks_batch(const std::vector<VideoTracks>& tracks, bool array_form);

Batch<Timeline> extract_batch(const Batch<OcrVideo>& ocr, const PipelineConfig& config);

struct FuseBatchResult {
  Batch<Timeline> timelines;
  std::vector<FusionAudit> audits;
};

// Visual timelines and transcripts are matched by video_id; a timeline
// without a transcript is fused against an empty one.
FuseBatchResult fuse_batch(const Batch<Timeline>& visual, const Batch<AsrTranscript>& asr,
                           const PipelineConfig& config, const NGramModel* universal,
                           const NGramModel* domain, const SyllableTable& table);

// The rescorer is the domain LM when given, otherwise the universal one.
std::vector<std::vector<Hypothesis>> decode_batch(const std::vector<EmissionMatrix>& emissions,
                                                  const PipelineConfig& config,
                                                  const NGramModel* universal,
                                                  const NGramModel* domain);
std::string write_decode_batch(const std::vector<std::vector<Hypothesis>>& results,
                               bool array_form);

EvalReport eval_batch(const Batch<Timeline>& refs, const Batch<Timeline>& hyps,
                      Aggregation aggregation);

}  // namespace subfuse
