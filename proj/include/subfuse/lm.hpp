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

// Character n-gram language model with stupid-backoff scoring.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subfuse {

class NGramModel {
 public:
  static constexpr double kDefaultAlpha = 0.4;

  NGramModel() = default;
  NGramModel(int order, double backoff_alpha);

  int order() const { return order_; }
  double backoff_alpha() const { return alpha_; }
  size_t vocab_size() const { return tables_.empty() ? 0 : tables_[0].size(); }
  bool empty() const { return vocab_size() == 0; }
  // Number of stored n-grams of length k (1-based).
  size_t count(int k) const;

  // log10 score of `token` after `context`. Only the last order-1 context
  // tokens are consulted. Each unseen level multiplies by alpha; a token
  // unseen even as a unigram gets alpha / (vocab + 1).
  double log10_prob(std::u32string_view context, char32_t token) const;

  // Direct access to a stored n-gram's log10 probability, if present.
  const double* find(std::u32string_view ngram) const;
  void set(std::u32string_view ngram, double log10_prob);

  // Stored n-grams of length k in code point order.
  std::vector<std::pair<std::u32string, double>> sorted_entries(int k) const;

 private:
  int order_ = 0;
  double alpha_ = kDefaultAlpha;
  std::vector<std::unordered_map<std::u32string, double>> tables_;
};

// Whitespace is removed from every line; n-grams never cross lines and no
// sentence boundary tokens are added. Throws Error(kValidation) if the
// corpus has no tokens.
NGramModel train_lm(std::span<const std::string> lines, int order,
                    double backoff_alpha = NGramModel::kDefaultAlpha);
// Splits `corpus` on newlines.
NGramModel train_lm_text(std::string_view corpus, int order,
                         double backoff_alpha = NGramModel::kDefaultAlpha);

// Mean log10 score per token. Throws Error(kValidation) for empty text.
double score_text(const NGramModel& model, std::string_view text);

enum class LmMix { kLinear, kLogLinear };

struct DualLmConfig {
  double lambda_domain = 0.5;
  LmMix mix = LmMix::kLinear;

  void validate() const;
};

// A universal and a domain model scored together. Either pointer may be
// null, in which case the other model is used alone.
class DualLm {
 public:
  DualLm(const NGramModel* universal, const NGramModel* domain,
         DualLmConfig config = {});

  bool empty() const { return universal_ == nullptr && domain_ == nullptr; }
  double log10_prob(std::u32string_view context, char32_t token) const;
  // Mean per-token log10 score.
  double score(std::u32string_view text) const;

 private:
  const NGramModel* universal_;
  const NGramModel* domain_;
  DualLmConfig config_;
};

double dual_score(const NGramModel& universal, const NGramModel& domain,
                  const DualLmConfig& config, std::string_view text);

std::string write_arpa(const NGramModel& model);
NGramModel read_arpa(std::string_view text);

}  // namespace subfuse
