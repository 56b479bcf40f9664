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

// Command-line front end. Everything goes through the C API; this file only
// deals with arguments and files.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subfuse/subfuse.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIo = 2;

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitIo, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Failure{kExitIo, "cannot read " + path};
  return ss.str();
}

void write_file(const fs::path& path, const char* data, size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kExitIo, "cannot write " + path.string()};
  out.write(data, static_cast<std::streamsize>(size));
  out.close();
  if (!out) throw Failure{kExitIo, "cannot write " + path.string()};
}

void check(sf_status status) {
  if (status == SF_OK) return;
  const int code = status == SF_ERR_IO ? kExitIo : kExitInput;
  throw Failure{code, sf_last_error()};
}

struct Buffer {
  sf_buffer b{nullptr, 0};
  ~Buffer() { sf_buffer_free(&b); }
  sf_buffer* operator&() { return &b; }
  std::string str() const { return b.data == nullptr ? std::string() : std::string(b.data, b.size); }
};

struct ConfigHandle {
  sf_config* c = nullptr;
  ~ConfigHandle() { sf_config_free(c); }
};

struct LmHandle {
  sf_lm* lm = nullptr;
  LmHandle() = default;
  LmHandle(const LmHandle&) = delete;
  LmHandle& operator=(const LmHandle&) = delete;
  ~LmHandle() { sf_lm_free(lm); }
};

std::string config_value(const ConfigHandle& cfg, const char* key) {
  Buffer out;
  check(sf_config_get(cfg.c, key, &out));
  return out.str();
}

void load_lm(const std::string& path, LmHandle& handle) {
  if (path.empty()) return;
  const std::string text = read_file(path);
  check(sf_lm_read_arpa(text.data(), text.size(), &handle.lm));
}

void write_srt_dir(const std::string& dir, const std::string& timelines) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitIo, "cannot create " + dir};
  size_t count = 0;
  check(sf_timeline_count(timelines.data(), timelines.size(), &count));
  for (size_t i = 0; i < count; ++i) {
    Buffer id;
    Buffer srt;
    check(sf_timeline_srt(timelines.data(), timelines.size(), i, &id, &srt));
    std::string name = id.str().empty() ? "video_" + std::to_string(i) : id.str();
    for (char& ch : name) {
      if (ch == '/' || ch == '\\') ch = '_';
    }
    write_file(fs::path(dir) / (name + ".srt"), srt.b.data, srt.b.size);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subtitle extraction and audio-visual subtitle fusion"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<int> threads;
  std::string syllable_path;
  app.add_option("--config", config_path, "Configuration file (key = value)");
  app.add_option("--set", overrides, "Override a config key (key=value); repeatable");
  app.add_option("--threads", threads, "Worker threads across videos")->check(CLI::PositiveNumber);
  app.add_option("--syllable-table", syllable_path, "Character to syllable table (TSV)");
  app.set_version_flag("--version", std::string("subfuse ") + sf_version());

  std::string output;

  auto* track = app.add_subcommand("track", "Link OCR detections into text tracks");
  std::string track_in;
  track->add_option("ocr", track_in, "OCR frames JSON")->required();
  track->add_option("-o,--output", output, "Tracks JSON")->required();

  auto* extract = app.add_subcommand("extract", "Build the visual subtitle timeline");
  std::string extract_in;
  std::string srt_dir;
  extract->add_option("ocr", extract_in, "OCR frames JSON")->required();
  extract->add_option("-o,--output", output, "Timeline JSON")->required();
  extract->add_option("--srt-dir", srt_dir, "Write one SRT per video here");

  auto* lm_train = app.add_subcommand("lm-train", "Train a character n-gram LM");
  std::string corpus_path;
  std::optional<int> order;
  lm_train->add_option("corpus", corpus_path, "Text corpus, one sentence per line")->required();
  lm_train->add_option("-o,--output", output, "ARPA model")->required();
  lm_train->add_option("--order", order, "N-gram order")->check(CLI::PositiveNumber);

  auto* lm_score = app.add_subcommand("lm-score", "Mean per-token log10 score of a text");
  std::string model_path;
  std::string score_text;
  lm_score->add_option("model", model_path, "ARPA model")->required();
  lm_score->add_option("text", score_text, "Text to score")->required();

  std::string lm_universal;
  std::string lm_domain;
  auto* decode = app.add_subcommand("decode", "CTC prefix beam search with LM fusion");
  std::string emissions_path;
  decode->add_option("emissions", emissions_path, "Emission matrix JSON")->required();
  decode->add_option("-o,--output", output, "N-best JSON")->required();
  decode->add_option("--lm-universal", lm_universal, "Universal ARPA model");
  decode->add_option("--lm-domain", lm_domain, "Domain ARPA model");

  auto* fuse = app.add_subcommand("fuse", "Fuse a visual timeline with ASR output");
  std::string visual_path;
  std::string asr_path;
  std::string audit_path;
  fuse->add_option("visual", visual_path, "Visual timeline JSON")->required();
  fuse->add_option("asr", asr_path, "ASR segments JSON")->required();
  fuse->add_option("-o,--output", output, "Fused timeline JSON")->required();
  fuse->add_option("--audit", audit_path, "Fusion audit JSON");
  fuse->add_option("--srt-dir", srt_dir, "Write one SRT per video here");
  fuse->add_option("--lm-universal", lm_universal, "Universal ARPA model");
  fuse->add_option("--lm-domain", lm_domain, "Domain ARPA model");

  auto* eval = app.add_subcommand("eval", "Character error rate of timelines");
  std::string ref_path;
  std::string hyp_path;
  std::string report_path;
  bool macro = false;
  eval->add_option("ref", ref_path, "Reference timeline JSON")->required();
  eval->add_option("hyp", hyp_path, "Hypothesis timeline JSON")->required();
  eval->add_flag("--macro", macro, "Average per-video CER instead of pooling edits");
  eval->add_option("--report", report_path, "Write the report JSON here");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic OCR/ASR/truth corpus");
  std::optional<uint64_t> seed;
  std::string profile_path;
  std::string sentences_path;
  std::string out_dir;
  size_t videos = 1;
  size_t lines = 20;
  synth->add_option("--seed", seed, "Random seed (overrides the profile)");
  synth->add_option("--profile", profile_path, "Noise profile JSON");
  synth->add_option("--videos", videos, "Number of videos")->check(CLI::PositiveNumber);
  synth->add_option("--lines", lines, "Subtitles per video")->check(CLI::PositiveNumber);
  synth->add_option("--sentences", sentences_path, "Sentence pool, one per line");
  synth->add_option("--out-dir", out_dir, "Directory for ocr.json, asr.json, truth.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    ConfigHandle cfg;
    check(sf_config_new(&cfg.c));
    if (!config_path.empty()) {
      const std::string text = read_file(config_path);
      check(sf_config_load(cfg.c, text.data(), text.size()));
    }
    for (const std::string& kv : overrides) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) throw Failure{kExitInput, "--set expects key=value, got " + kv};
      check(sf_config_set(cfg.c, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (threads) check(sf_config_set(cfg.c, "threads", std::to_string(*threads).c_str()));
    if (order) check(sf_config_set(cfg.c, "lm_order", std::to_string(*order).c_str()));
    if (macro) check(sf_config_set(cfg.c, "aggregation", "macro"));
    if (syllable_path.empty()) syllable_path = config_value(cfg, "syllable_table");
    if (!syllable_path.empty()) {
      const std::string tsv = read_file(syllable_path);
      check(sf_config_set_syllable_table(cfg.c, tsv.data(), tsv.size()));
    }
    if (lm_universal.empty()) lm_universal = config_value(cfg, "lm_universal");
    if (lm_domain.empty()) lm_domain = config_value(cfg, "lm_domain");

    if (*track) {
      const std::string in = read_file(track_in);
      Buffer out;
      check(sf_track(cfg.c, in.data(), in.size(), &out));
      write_file(output, out.b.data, out.b.size);
    } else if (*extract) {
      const std::string in = read_file(extract_in);
      Buffer out;
      check(sf_extract(cfg.c, in.data(), in.size(), &out));
      write_file(output, out.b.data, out.b.size);
      write_srt_dir(srt_dir, out.str());
    } else if (*lm_train) {
      const std::string corpus = read_file(corpus_path);
      LmHandle lm;
      check(sf_lm_train(cfg.c, corpus.data(), corpus.size(), &lm.lm));
      Buffer arpa;
      check(sf_lm_write_arpa(lm.lm, &arpa));
      write_file(output, arpa.b.data, arpa.b.size);
    } else if (*lm_score) {
      LmHandle lm;
      load_lm(model_path, lm);
      double score = 0.0;
      check(sf_lm_score(lm.lm, score_text.data(), score_text.size(), &score));
      std::printf("%.6f\n", score);
    } else if (*decode) {
      const std::string in = read_file(emissions_path);
      LmHandle u;
      LmHandle d;
      load_lm(lm_universal, u);
      load_lm(lm_domain, d);
      Buffer out;
      check(sf_decode(cfg.c, in.data(), in.size(), u.lm, d.lm, &out));
      write_file(output, out.b.data, out.b.size);
    } else if (*fuse) {
      const std::string visual = read_file(visual_path);
      const std::string asr = read_file(asr_path);
      LmHandle u;
      LmHandle d;
      load_lm(lm_universal, u);
      load_lm(lm_domain, d);
      Buffer out;
      Buffer audit;
      check(sf_fuse(cfg.c, visual.data(), visual.size(), asr.data(), asr.size(), u.lm, d.lm,
                    &out, &audit));
      write_file(output, out.b.data, out.b.size);
      if (!audit_path.empty()) write_file(audit_path, audit.b.data, audit.b.size);
      write_srt_dir(srt_dir, out.str());
    } else if (*eval) {
      const std::string ref = read_file(ref_path);
      const std::string hyp = read_file(hyp_path);
      Buffer report;
      Buffer table;
      check(sf_eval(cfg.c, ref.data(), ref.size(), hyp.data(), hyp.size(), &report, &table));
      if (!report_path.empty()) write_file(report_path, report.b.data, report.b.size);
      std::fwrite(table.b.data, 1, table.b.size, stdout);
    } else if (*synth) {
      std::string profile;
      if (!profile_path.empty()) profile = read_file(profile_path);
      std::string pool;
      if (!sentences_path.empty()) pool = read_file(sentences_path);
      const uint64_t seed_value = seed.value_or(0);
      Buffer ocr;
      Buffer asr;
      Buffer truth;
      check(sf_synth(profile_path.empty() ? nullptr : profile.data(), profile.size(),
                     seed ? &seed_value : nullptr, videos, lines,
                     sentences_path.empty() ? nullptr : pool.data(), pool.size(), &ocr, &asr,
                     &truth));
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw Failure{kExitIo, "cannot create " + out_dir};
      write_file(fs::path(out_dir) / "ocr.json", ocr.b.data, ocr.b.size);
      write_file(fs::path(out_dir) / "asr.json", asr.b.data, asr.b.size);
      write_file(fs::path(out_dir) / "truth.json", truth.b.data, truth.b.size);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "subfuse: %s\n", f.message.c_str());
    return f.code;
  }
  return kExitOk;
}
