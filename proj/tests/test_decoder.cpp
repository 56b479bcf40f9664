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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "subfuse/decoder.hpp"
#include "subfuse/error.hpp"
#include "subfuse/lm.hpp"

using namespace subfuse;

namespace {

EmissionMatrix random_emissions(std::mt19937& rng, size_t T, size_t V) {
  std::vector<std::string> tokens = {"<b>"};
  for (size_t v = 1; v < V; ++v) tokens.push_back(std::string(1, static_cast<char>('a' + v - 1)));
  std::vector<double> lp(T * V);
  std::uniform_real_distribution<double> logit(-3.0, 3.0);
  for (size_t t = 0; t < T; ++t) {
    double z = 0.0;
    for (size_t v = 0; v < V; ++v) z += std::exp(lp[t * V + v] = logit(rng));
    for (size_t v = 0; v < V; ++v) lp[t * V + v] -= std::log(z);
  }
  return EmissionMatrix(tokens, T, lp);
}

EmissionMatrix uniform(size_t T, size_t V) {
  std::vector<std::string> tokens = {"<b>"};
  for (size_t v = 1; v < V; ++v) tokens.push_back(std::string(1, static_cast<char>('a' + v - 1)));
  return EmissionMatrix(tokens, T, std::vector<double>(T * V, -std::log(static_cast<double>(V))));
}

Hypothesis hyp(std::vector<int> labels, double score) {
  Hypothesis h;
  h.labels = std::move(labels);
  h.ctc_log_prob = h.fused_score = h.final_score = score;
  return h;
}

}  // namespace

TEST_CASE("ctc collapse") {
  CHECK(ctc_collapse(std::vector<int>{1, 1, 0, 2}, 3) == std::vector<int>{1, 2});
  CHECK(ctc_collapse(std::vector<int>{0, 0, 0}, 3).empty());
  CHECK(ctc_collapse(std::vector<int>{1, 0, 1}, 3) == std::vector<int>{1, 1});
  CHECK_THROWS_AS(ctc_collapse(std::vector<int>{3}, 3), Error);
  CHECK_THROWS_AS(ctc_collapse(std::vector<int>{-1}, 3), Error);
}

TEST_CASE("emission validation") {
  CHECK_THROWS_AS(EmissionMatrix({"<b>", "a"}, 1, {std::log(0.5), std::log(0.6)}), Error);
  CHECK_THROWS_AS(EmissionMatrix({"<b>"}, 1, {0.0}), Error);
  CHECK_THROWS_AS(EmissionMatrix({"<b>", "a"}, 0, {}), Error);
  const EmissionMatrix m = parse_emissions(R"({"tokens": ["<b>", "a"], "log_probs": [[-0.6931471805599453, -0.6931471805599453]]})");
  CHECK(m.frames() == 1);
  CHECK(m.vocab() == 2);
  CHECK_THROWS_AS(parse_emissions(R"({"tokens": ["<b>", "a"], "log_probs": [[0.0]]})"), Error);
}

TEST_CASE("single frame one-hot") {
  const EmissionMatrix m({"<b>", "a"}, 1, {-1e9 - 0.0, 0.0});
  const auto hyps = prefix_beam_search(m, DecodeOptions{});
  REQUIRE_FALSE(hyps.empty());
  CHECK(hyps[0].labels == std::vector<int>{1});
  CHECK(hyps[0].ctc_log_prob == doctest::Approx(0.0));
  CHECK(hyps[0].text == "a");
}

TEST_CASE("two uniform frames") {
  const auto hyps = prefix_beam_search(uniform(2, 2), DecodeOptions{});
  REQUIRE(hyps.size() == 2);
  CHECK(hyps[0].labels == std::vector<int>{1});
  CHECK(std::exp(hyps[0].ctc_log_prob) == doctest::Approx(0.75));
  CHECK(hyps[1].labels.empty());
  CHECK(std::exp(hyps[1].ctc_log_prob) == doctest::Approx(0.25));
}

TEST_CASE("unbounded beam matches exhaustive path enumeration") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const size_t T = 1 + rng() % 4;
    const size_t V = 2 + rng() % 3;
    const EmissionMatrix em = random_emissions(rng, T, V);
    const auto sums = oracle::ctc_path_sums(em);
    double total = 0.0;
    for (const auto& [labels, p] : sums) total += p;
    CHECK(std::abs(total - 1.0) < 1e-9);

    DecodeOptions opt;
    opt.beam_width = static_cast<size_t>(std::pow(V, T)) + 1;
    opt.n_best = opt.beam_width;
    const auto hyps = prefix_beam_search(em, opt);
    CHECK(hyps.size() == sums.size());
    for (const Hypothesis& h : hyps) {
      REQUIRE(sums.count(h.labels) == 1);
      CHECK(std::abs(h.ctc_log_prob - std::log(sums.at(h.labels))) < 1e-9);
    }
  }
}

TEST_CASE("beam width and n-best validation") {
  DecodeOptions opt;
  opt.beam_width = 0;
  CHECK_THROWS_AS(opt.validate(), Error);
  opt = DecodeOptions{};
  opt.n_best = 0;
  CHECK_THROWS_AS(opt.validate(), Error);
}

TEST_CASE("shallow fusion adds weighted lm scores") {
  const NGramModel lm = train_lm(std::vector<std::string>{"ab", "ab", "b"}, 2);
  const DualLm dual(&lm, nullptr);
  std::mt19937 rng(2);
  const EmissionMatrix em = random_emissions(rng, 3, 3);
  DecodeOptions opt;
  opt.beam_width = 64;
  opt.n_best = 64;
  opt.lm_weight = 0.3;
  for (const Hypothesis& h : prefix_beam_search(em, opt, &dual)) {
    double lm_sum = 0.0;
    std::u32string ctx;
    for (int l : h.labels) {
      const char32_t c = static_cast<char32_t>('a' + l - 1);
      lm_sum += lm.log10_prob(ctx, c);
      ctx.push_back(c);
    }
    CHECK(h.lm_score == doctest::Approx(lm_sum));
    CHECK(h.fused_score == doctest::Approx(h.ctc_log_prob + 0.3 * lm_sum));
  }
}

TEST_CASE("wider beams never lower the best fused score") {
  std::mt19937 rng(31);
  const NGramModel lm = train_lm(std::vector<std::string>{"abca", "bcab", "cc"}, 3);
  const DualLm dual(&lm, nullptr);
  for (int trial = 0; trial < 100; ++trial) {
    const EmissionMatrix em = random_emissions(rng, 3 + rng() % 5, 4);
    double prev = -std::numeric_limits<double>::infinity();
    for (size_t beam = 1; beam <= 16; beam *= 2) {
      DecodeOptions opt;
      opt.beam_width = beam;
      opt.lm_weight = trial % 2 == 0 ? 0.0 : 0.3;
      const double best = prefix_beam_search(em, opt, &dual)[0].fused_score;
      CHECK(best >= prev - 1e-12);
      prev = std::max(prev, best);
    }
  }
}

TEST_CASE("rescoring") {
  const std::vector<Hypothesis> hyps = {hyp({1}, -1.0), hyp({2}, -2.0), hyp({3}, -3.0)};
  const Rescorer prefers_last = [](const Hypothesis& h) { return static_cast<double>(h.labels[0]); };
  auto same = rescore_nbest(hyps, prefers_last, 0.0);
  CHECK(same[0].labels == std::vector<int>{1});
  CHECK(same[2].labels == std::vector<int>{3});
  auto constant = rescore_nbest(hyps, [](const Hypothesis&) { return 5.0; }, 0.5);
  CHECK(constant[0].labels == std::vector<int>{1});
  CHECK(constant[1].labels == std::vector<int>{2});

  const std::vector<Hypothesis> tied = {hyp({1}, -1.0), hyp({2}, -1.0)};
  auto flipped = rescore_nbest(tied, prefers_last, 0.5);
  CHECK(flipped[0].labels == std::vector<int>{2});
  CHECK(flipped[0].final_score == doctest::Approx(-1.0 + 0.5 * 2.0));
}

TEST_CASE("lm rescorer and json output") {
  const NGramModel lm = train_lm(std::vector<std::string>{"ab"}, 2);
  const Rescorer r = make_lm_rescorer(lm);
  Hypothesis h = hyp({1, 2}, -1.0);
  h.text = "ab";
  CHECK(r(h) == doctest::Approx(score_text(lm, "ab")));
  h.text.clear();
  CHECK(r(h) == 0.0);
  const std::string json = hypotheses_to_json(std::vector<Hypothesis>{hyp({1}, -0.5)});
  CHECK(json.find("\"nbest\"") != std::string::npos);
}
