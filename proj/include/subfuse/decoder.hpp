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

// CTC prefix beam search with dual-LM shallow fusion and n-best rescoring.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subfuse/lm.hpp"

namespace subfuse {

// T x V natural-log probabilities; token 0 is the blank. Every row is a
// normalized distribution (log-sum-exp within 1e-6 of zero).
class EmissionMatrix {
 public:
  EmissionMatrix(std::vector<std::string> tokens, size_t frames,
                 std::vector<double> log_probs);

  size_t frames() const { return frames_; }
  size_t vocab() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  double operator()(size_t t, size_t v) const { return log_probs_[t * vocab() + v]; }

 private:
  std::vector<std::string> tokens_;
  size_t frames_;
  std::vector<double> log_probs_;
};

// {"tokens": [...], "log_probs": [[...], ...]}
EmissionMatrix parse_emissions(std::string_view document);
std::vector<EmissionMatrix> parse_emission_batch(std::string_view document, bool* array_form);

double log_add_exp(double a, double b);

// Merges repeats then removes blanks. Throws Error(kValidation) for an
// index outside [0, vocab).
std::vector<int> ctc_collapse(std::span<const int> path, size_t vocab);

struct Hypothesis {
  std::vector<int> labels;
  std::string text;
  double ctc_log_prob = 0.0;  // natural log, exact over merged paths
  double lm_score = 0.0;      // summed per-token log10 LM score
  double fused_score = 0.0;   // ctc_log_prob + lm_weight * lm_score
  double final_score = 0.0;   // after rescoring; equals fused_score before
};

struct DecodeOptions {
  size_t beam_width = 10;
  double lm_weight = 0.3;
  size_t n_best = 10;

  void validate() const;
};

// `lm` may be null or empty for pure CTC search.
std::vector<Hypothesis> prefix_beam_search(const EmissionMatrix& emissions,
                                           const DecodeOptions& options,
                                           const DualLm* lm = nullptr);

using Rescorer = std::function<double(const Hypothesis&)>;

// final_score = fused_score + weight * rescorer(h); stable descending sort.
std::vector<Hypothesis> rescore_nbest(std::vector<Hypothesis> hyps,
                                      const Rescorer& rescorer, double weight);

// Mean log10 LM score of the hypothesis text (0 for an empty hypothesis).
Rescorer make_lm_rescorer(const NGramModel& model);

std::string hypotheses_to_json(std::span<const Hypothesis> hyps);

}  // namespace subfuse
