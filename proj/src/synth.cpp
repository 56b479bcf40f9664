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

#include "subfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "json_io.hpp"
#include "subfuse/embedded_data.hpp"
#include "subfuse/error.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

void NoiseProfile::validate() const {
  for (const auto& [name, v] : {std::pair{"char_sub_rate", char_sub_rate},
                                std::pair{"char_homophone_rate", char_homophone_rate},
                                std::pair{"det_drop_rate", det_drop_rate},
                                std::pair{"bg_text_rate", bg_text_rate},
                                std::pair{"asr_sub_rate", asr_sub_rate},
                                std::pair{"merge_fault_rate", merge_fault_rate}}) {
    if (!(v >= 0.0 && v <= 1.0)) fail_validation(std::string(name) + " must be in [0, 1]");
  }
}

NoiseProfile NoiseProfile::parse_json(std::string_view document) {
  const auto doc = json_io::parse(document);
  if (!doc.is_object()) fail_validation("noise profile must be a JSON object");
  NoiseProfile p;
  for (const auto& [key, value] : doc.items()) {
    const std::string where = "noise profile field \"" + key + "\"";
    if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) fail_validation(where + " must be an integer");
      p.seed = value.get<uint64_t>();
      continue;
    }
    double* slot = key == "char_sub_rate"         ? &p.char_sub_rate
                   : key == "char_homophone_rate" ? &p.char_homophone_rate
                   : key == "det_drop_rate"       ? &p.det_drop_rate
                   : key == "bg_text_rate"        ? &p.bg_text_rate
                   : key == "asr_sub_rate"        ? &p.asr_sub_rate
                   : key == "merge_fault_rate"    ? &p.merge_fault_rate
                                                  : nullptr;
    if (slot == nullptr) fail_validation("unknown noise profile key \"" + key + "\"");
    *slot = json_io::get_number(value, where);
  }
  p.validate();
  return p;
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Distribution helpers are written out because the standard library's
// distributions are not specified bit-for-bit across implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  size_t below(size_t n) { return n == 0 ? 0 : static_cast<size_t>(engine_() % n); }
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<size_t>(hi - lo + 1))); }
  bool chance(double p) { return p > 0.0 && uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

std::vector<char32_t> alphabet_of(const SyllableTable& table, std::span<const std::string> lines) {
  std::set<char32_t> chars;
  for (const std::string& l : lines) {
    for (char32_t c : remove_spaces(utf8_decode(l))) chars.insert(c);
  }
  // Table characters widen the substitution alphabet deterministically.
  for (char32_t c = 0x4E00; c <= 0x9FFF; ++c) {
    if (table.find(c) != nullptr) chars.insert(c);
  }
  return {chars.begin(), chars.end()};
}

char32_t random_other(Rng& rng, const std::vector<char32_t>& alphabet, char32_t not_this) {
  if (alphabet.size() < 2) return not_this;
  while (true) {
    const char32_t c = alphabet[rng.below(alphabet.size())];
    if (c != not_this) return c;
  }
}

struct Misread {
  size_t position;
  char32_t replacement;
  double show_prob;
};

struct Placement {
  int64_t first_frame;
  int64_t last_frame;
  double x0, y0, x1, y1;
};

}  // namespace

SynthVideo generate_corpus(const std::string& video_id,
                           std::span<const std::string> truth_lines,
                           const NoiseProfile& profile, const SynthOptions& options,
                           const SyllableTable& table) {
  profile.validate();
  if (truth_lines.empty()) fail_validation("synthetic corpus needs at least one truth line");
  if (options.fps < 1 || options.frame_width < 64 || options.frame_height < 64) {
    fail_validation("synthetic frame geometry is invalid");
  }
  Rng rng(profile.seed ^ fnv1a(video_id));
  const std::vector<char32_t> alphabet = alphabet_of(table, truth_lines);
  const double W = options.frame_width;
  const double H = options.frame_height;
  auto time_of = [&](int64_t frame) { return frame * 1000 / options.fps; };

  std::vector<std::u32string> lines;
  for (const std::string& l : truth_lines) {
    lines.push_back(remove_spaces(utf8_decode(l)));
    if (lines.back().empty()) fail_validation("truth lines must not be empty");
  }

  // Layout: each subtitle on the bottom band; a merge fault shows the next
  // subtitle immediately, in the previous one's box.
  std::vector<Placement> place;
  int64_t cursor = rng.range(5, 10);
  const double box_h = 0.06 * H;
  const double y_top = 0.86 * H;
  for (size_t i = 0; i < lines.size(); ++i) {
    const bool merge = i > 0 && rng.chance(profile.merge_fault_rate);
    const int duration = std::clamp(3 * static_cast<int>(lines[i].size()), 15, 40) + rng.range(0, 5);
    Placement p{};
    if (merge) {
      p = place.back();
      p.first_frame = place.back().last_frame + 1;
    } else {
      if (i > 0) cursor = place.back().last_frame + 1 + rng.range(15, 25);
      p.first_frame = cursor;
      const double char_w = std::min(0.035 * W, 0.9 * W / static_cast<double>(lines[i].size()));
      const double width = char_w * static_cast<double>(lines[i].size());
      p.x0 = std::floor(0.5 * (W - width));
      p.x1 = p.x0 + std::ceil(width);
      p.y0 = y_top;
      p.y1 = y_top + box_h;
    }
    p.last_frame = p.first_frame + duration - 1;
    place.push_back(p);
  }
  const int64_t total_frames = place.back().last_frame + 1 + 5;

  SynthVideo video;
  video.ocr.video_id = video.asr.video_id = video.truth.video_id = video_id;
  video.ocr.frame_width = options.frame_width;
  video.ocr.frame_height = options.frame_height;
  video.ocr.frames.resize(static_cast<size_t>(total_frames));
  for (int64_t f = 0; f < total_frames; ++f) {
    video.ocr.frames[static_cast<size_t>(f)].frame_index = f;
    video.ocr.frames[static_cast<size_t>(f)].time_ms = time_of(f);
  }

  for (size_t i = 0; i < lines.size(); ++i) {
    const std::u32string& line = lines[i];
    const Placement& p = place[i];

    std::vector<Misread> misreads;
    for (size_t j = 0; j < line.size(); ++j) {
      const double u = rng.uniform();
      if (u < profile.char_sub_rate) {
        misreads.push_back({j, random_other(rng, alphabet, line[j]), 0.5 + 0.4 * rng.uniform()});
      } else if (u < profile.char_sub_rate + profile.char_homophone_rate) {
        const auto homes = table.homophones(line[j]);
        if (!homes.empty()) {
          misreads.push_back({j, homes[rng.below(homes.size())], 0.5 + 0.4 * rng.uniform()});
        }
      }
    }

    for (int64_t f = p.first_frame; f <= p.last_frame; ++f) {
      std::u32string shown = line;
      for (const Misread& m : misreads) {
        if (rng.uniform() < m.show_prob) shown[m.position] = m.replacement;
      }
      const int jx = rng.range(-1, 1);
      const int jy = rng.range(-1, 1);
      const double conf = 0.85 + 0.15 * rng.uniform();
      if (rng.chance(profile.det_drop_rate)) continue;
      FrameDetection d;
      d.frame_index = f;
      d.time_ms = time_of(f);
      d.quad = BoundingQuad::from_rect(std::max(0.0, p.x0 + jx), std::max(0.0, p.y0 + jy),
                                       p.x1 + jx, p.y1 + jy);
      d.text = utf8_encode(shown);
      d.conf = conf;
      video.ocr.frames[static_cast<size_t>(f)].detections.push_back(std::move(d));
    }

    SubtitleSegment truth;
    truth.start_ms = time_of(p.first_frame);
    truth.end_ms = time_of(p.last_frame);
    truth.text = utf8_encode(line);
    video.truth.segments.push_back(std::move(truth));

    std::u32string heard = line;
    for (char32_t& c : heard) {
      if (rng.chance(profile.asr_sub_rate)) c = random_other(rng, alphabet, c);
    }
    video.asr.segments.push_back(AsrSegment{time_of(p.first_frame), time_of(p.last_frame),
                                            utf8_encode(heard), 0.9});
  }

  // Background text: scene captions and signage away from the subtitle band.
  struct Background {
    std::string text;
    double x0, y0, x1, y1;
    double conf;
    int remaining = 0;
  } bg;
  for (int64_t f = 0; f < total_frames; ++f) {
    if (bg.remaining == 0 && rng.chance(profile.bg_text_rate)) {
      std::u32string text;
      const int len = rng.range(4, 8);
      for (int k = 0; k < len; ++k) text.push_back(alphabet[rng.below(alphabet.size())]);
      const double char_w = 0.025 * W;
      const double width = char_w * len;
      bg.text = utf8_encode(text);
      bg.x0 = std::floor(rng.uniform() * (W - width));
      bg.x1 = bg.x0 + std::ceil(width);
      bg.y0 = std::floor((0.05 + 0.45 * rng.uniform()) * H);
      bg.y1 = bg.y0 + std::ceil(0.05 * H);
      bg.conf = 0.6 + 0.35 * rng.uniform();
      bg.remaining = rng.range(5, 40);
    }
    if (bg.remaining > 0) {
      FrameDetection d;
      d.frame_index = f;
      d.time_ms = time_of(f);
      d.quad = BoundingQuad::from_rect(bg.x0, bg.y0, bg.x1, bg.y1);
      d.text = bg.text;
      d.conf = bg.conf;
      video.ocr.frames[static_cast<size_t>(f)].detections.push_back(std::move(d));
      --bg.remaining;
    }
  }
  return video;
}

std::vector<std::string> parse_sentence_pool(std::string_view text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = strip_utf8(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> builtin_sentences() {
  return parse_sentence_pool(embedded::sentences_txt());
}

std::vector<std::vector<std::string>> make_scripts(uint64_t seed, size_t n_videos,
                                                   size_t lines_per_video,
                                                   std::span<const std::string> pool,
                                                   double followup_rate,
                                                   const SyllableTable& table) {
  if (pool.empty()) fail_validation("sentence pool is empty");
  Rng rng(seed ^ 0x5C41F7ull);
  const std::vector<char32_t> alphabet = alphabet_of(table, pool);
  std::vector<std::vector<std::string>> scripts(n_videos);
  for (auto& script : scripts) {
    std::u32string prev;
    while (script.size() < lines_per_video) {
      if (prev.size() >= 5 && rng.chance(followup_rate)) {
        // Rewrite about 30% of the characters so the pair stays similar
        // (Dice-LCS between 0.6 and 0.8) without being the same line.
        std::u32string next = prev;
        const size_t edits = (3 * prev.size() + 9) / 10;
        std::vector<size_t> positions(prev.size());
        for (size_t k = 0; k < positions.size(); ++k) positions[k] = k;
        for (size_t k = 0; k < edits; ++k) {
          const size_t pick = k + rng.below(positions.size() - k);
          std::swap(positions[k], positions[pick]);
          next[positions[k]] = random_other(rng, alphabet, prev[positions[k]]);
        }
        script.push_back(utf8_encode(next));
        prev.clear();
        continue;
      }
      const std::string& line = pool[rng.below(pool.size())];
      script.push_back(line);
      prev = remove_spaces(utf8_decode(line));
    }
  }
  return scripts;
}

Batch<OcrVideo> SynthCorpus::ocr_batch() const {
  Batch<OcrVideo> b{{}, true};
  for (const SynthVideo& v : videos) b.items.push_back(v.ocr);
  return b;
}

Batch<AsrTranscript> SynthCorpus::asr_batch() const {
  Batch<AsrTranscript> b{{}, true};
  for (const SynthVideo& v : videos) b.items.push_back(v.asr);
  return b;
}

Batch<Timeline> SynthCorpus::truth_batch() const {
  Batch<Timeline> b{{}, true};
  for (const SynthVideo& v : videos) b.items.push_back(v.truth);
  return b;
}

SynthCorpus generate_dataset(std::span<const std::string> pool, size_t n_videos,
                             size_t lines_per_video, const NoiseProfile& profile,
                             const SynthOptions& options, const SyllableTable& table) {
  const auto scripts = make_scripts(profile.seed, n_videos, lines_per_video, pool, 0.3, table);
  SynthCorpus corpus;
  for (size_t i = 0; i < scripts.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%03zu", i);
    corpus.videos.push_back(generate_corpus(id, scripts[i], profile, options, table));
  }
  return corpus;
}

}  // namespace subfuse
