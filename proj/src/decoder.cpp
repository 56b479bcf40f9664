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

#include "subfuse/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "json_io.hpp"
#include "subfuse/error.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

EmissionMatrix::EmissionMatrix(std::vector<std::string> tokens, size_t frames,
                               std::vector<double> log_probs)
    : tokens_(std::move(tokens)), frames_(frames), log_probs_(std::move(log_probs)) {
  if (frames_ < 1) fail_validation("emission matrix needs at least one frame");
  if (tokens_.size() < 2) fail_validation("emission matrix needs a blank and at least one token");
  if (log_probs_.size() != frames_ * tokens_.size()) {
    fail_validation("emission matrix size does not match T x V");
  }
  for (size_t t = 0; t < frames_; ++t) {
    double total = kNegInf;
    for (size_t v = 0; v < vocab(); ++v) {
      const double lp = (*this)(t, v);
      if (std::isnan(lp) || lp > 0.0) {
        fail_validation("frame " + std::to_string(t) + ": log probability must be <= 0");
      }
      total = log_add_exp(total, lp);
    }
    if (!(std::abs(total) <= 1e-6)) {
      fail_validation("frame " + std::to_string(t) + ": distribution is not normalized");
    }
  }
}

namespace {

EmissionMatrix emissions_from_json(const json_io::Json& doc) {
  const std::string where = "emissions";
  const auto& toks = json_io::get_array(doc, "tokens", where);
  std::vector<std::string> tokens;
  for (const auto& t : toks) {
    if (!t.is_string()) fail_validation(where + ": tokens must be strings");
    tokens.push_back(t.get<std::string>());
  }
  const auto& rows = json_io::get_array(doc, "log_probs", where);
  std::vector<double> values;
  for (size_t t = 0; t < rows.size(); ++t) {
    if (!rows[t].is_array() || rows[t].size() != tokens.size()) {
      fail_validation(where + ": row " + std::to_string(t) + " must hold one value per token");
    }
    for (const auto& x : rows[t]) values.push_back(json_io::get_number(x, where));
  }
  return EmissionMatrix(std::move(tokens), rows.size(), std::move(values));
}

}  // namespace

EmissionMatrix parse_emissions(std::string_view document) {
  return emissions_from_json(json_io::parse(document));
}

std::vector<EmissionMatrix> parse_emission_batch(std::string_view document, bool* array_form) {
  const auto doc = json_io::parse(document);
  std::vector<EmissionMatrix> out;
  if (array_form != nullptr) *array_form = doc.is_array();
  if (doc.is_array()) {
    for (const auto& item : doc) out.push_back(emissions_from_json(item));
  } else {
    out.push_back(emissions_from_json(doc));
  }
  return out;
}

std::vector<int> ctc_collapse(std::span<const int> path, size_t vocab) {
  std::vector<int> out;
  int prev = -1;
  for (int idx : path) {
    if (idx < 0 || static_cast<size_t>(idx) >= vocab) {
      fail_validation("token index " + std::to_string(idx) + " outside vocabulary");
    }
    if (idx != prev && idx != 0) out.push_back(idx);
    prev = idx;
  }
  return out;
}

void DecodeOptions::validate() const {
  if (beam_width < 1) fail_validation("beam_width must be >= 1");
  if (n_best < 1) fail_validation("n_best must be >= 1");
  if (!std::isfinite(lm_weight)) fail_validation("lm_weight must be finite");
}

namespace {

struct PrefixScore {
  double blank = kNegInf;
  double non_blank = kNegInf;
  double lm = 0.0;
  std::u32string text;

  double ctc() const { return log_add_exp(blank, non_blank); }
};

using Beam = std::map<std::vector<int>, PrefixScore>;

struct Ranked {
  const std::vector<int>* labels;
  const PrefixScore* score;
  double fused;
};

std::vector<Ranked> rank(const Beam& beam, double lm_weight) {
  std::vector<Ranked> out;
  out.reserve(beam.size());
  for (const auto& [labels, score] : beam) {
    out.push_back(Ranked{&labels, &score, score.ctc() + lm_weight * score.lm});
  }
  // The map already iterates in lexicographic label order, so a stable
  // sort on the score alone breaks ties lexicographically.
  std::stable_sort(out.begin(), out.end(),
                   [](const Ranked& a, const Ranked& b) { return a.fused > b.fused; });
  return out;
}

}  // namespace

std::vector<Hypothesis> prefix_beam_search(const EmissionMatrix& em,
                                           const DecodeOptions& options,
                                           const DualLm* lm) {
  options.validate();
  const bool use_lm = lm != nullptr && !lm->empty();
  std::vector<std::u32string> token_cps;
  for (const std::string& tok : em.tokens()) token_cps.push_back(utf8_decode(tok));

  // Weighted LM contribution of appending token v after `text`.
  auto lm_extension = [&](const std::u32string& text, size_t v) {
    if (!use_lm) return 0.0;
    double sum = 0.0;
    std::u32string ctx = text;
    for (char32_t cp : token_cps[v]) {
      if (is_space(cp)) continue;
      sum += lm->log10_prob(ctx, cp);
      ctx.push_back(cp);
    }
    return sum;
  };

  Beam beam;
  beam[{}].blank = 0.0;

  for (size_t t = 0; t < em.frames(); ++t) {
    Beam next;
    auto extended = [&](const std::vector<int>& parent, const PrefixScore& ps,
                         size_t v) -> PrefixScore& {
      std::vector<int> child = parent;
      child.push_back(static_cast<int>(v));
      auto [it, inserted] = next.try_emplace(std::move(child));
      if (inserted) {
        it->second.lm = ps.lm + lm_extension(ps.text, v);
        it->second.text = ps.text + token_cps[v];
      }
      return it->second;
    };
    auto same = [&](const std::vector<int>& prefix, const PrefixScore& ps) -> PrefixScore& {
      auto [it, inserted] = next.try_emplace(prefix);
      if (inserted) {
        it->second.lm = ps.lm;
        it->second.text = ps.text;
      }
      return it->second;
    };

    for (const auto& [prefix, ps] : beam) {
      const double total = ps.ctc();
      for (size_t v = 0; v < em.vocab(); ++v) {
        const double lp = em(t, v);
        if (lp == kNegInf) continue;
        if (v == 0) {
          PrefixScore& s = same(prefix, ps);
          s.blank = log_add_exp(s.blank, total + lp);
          continue;
        }
        const bool repeat = !prefix.empty() && static_cast<size_t>(prefix.back()) == v;
        if (repeat) {
          if (ps.non_blank != kNegInf) {
            PrefixScore& s = same(prefix, ps);
            s.non_blank = log_add_exp(s.non_blank, ps.non_blank + lp);
          }
          if (ps.blank != kNegInf) {
            PrefixScore& s = extended(prefix, ps, v);
            s.non_blank = log_add_exp(s.non_blank, ps.blank + lp);
          }
        } else if (total != kNegInf) {
          PrefixScore& s = extended(prefix, ps, v);
          s.non_blank = log_add_exp(s.non_blank, total + lp);
        }
      }
    }

    const auto ranked = rank(next, options.lm_weight);
    Beam pruned;
    for (size_t i = 0; i < ranked.size() && i < options.beam_width; ++i) {
      pruned.emplace(*ranked[i].labels, *ranked[i].score);
    }
    beam = std::move(pruned);
  }

  std::vector<Hypothesis> out;
  const auto ranked = rank(beam, options.lm_weight);
  for (size_t i = 0; i < ranked.size() && i < options.n_best; ++i) {
    Hypothesis h;
    h.labels = *ranked[i].labels;
    h.text = utf8_encode(ranked[i].score->text);
    h.ctc_log_prob = ranked[i].score->ctc();
    h.lm_score = ranked[i].score->lm;
    h.fused_score = ranked[i].fused;
    h.final_score = h.fused_score;
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<Hypothesis> rescore_nbest(std::vector<Hypothesis> hyps,
                                      const Rescorer& rescorer, double weight) {
  for (Hypothesis& h : hyps) h.final_score = h.fused_score + weight * rescorer(h);
  std::stable_sort(hyps.begin(), hyps.end(), [](const Hypothesis& a, const Hypothesis& b) {
    return a.final_score > b.final_score;
  });
  return hyps;
}

Rescorer make_lm_rescorer(const NGramModel& model) {
  return [&model](const Hypothesis& h) {
    if (remove_spaces(utf8_decode(h.text)).empty()) return 0.0;
    return score_text(model, h.text);
  };
}

std::string hypotheses_to_json(std::span<const Hypothesis> hyps) {
  json_io::Json arr = json_io::Json::array();
  for (const Hypothesis& h : hyps) {
    arr.push_back({{"labels", h.labels},
                   {"text", h.text},
                   {"ctc_log_prob", h.ctc_log_prob},
                   {"lm_score", h.lm_score},
                   {"fused_score", h.fused_score},
                   {"final_score", h.final_score}});
  }
  return json_io::dump(json_io::Json{{"nbest", std::move(arr)}});
}

}  // namespace subfuse
