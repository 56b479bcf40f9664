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

#include "subfuse/subfuse.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <string_view>

#include "subfuse/config.hpp"
#include "subfuse/error.hpp"
#include "subfuse/eval.hpp"
#include "subfuse/lm.hpp"
#include "subfuse/model.hpp"
#include "subfuse/pipeline.hpp"
#include "subfuse/synth.hpp"
#include "subfuse/textsim.hpp"

struct sf_config {
  subfuse::PipelineConfig config;
  std::optional<subfuse::SyllableTable> table;

  const subfuse::SyllableTable& syllables() const {
    return table ? *table : subfuse::SyllableTable::builtin();
  }
};

struct sf_lm {
  subfuse::NGramModel model;
};

namespace {

thread_local std::string g_last_error;

struct ArgumentError {
  const char* what;
};

template <typename Fn>
sf_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SF_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what;
    return SF_ERR_ARGUMENT;
  } catch (const subfuse::Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
      case subfuse::ErrorKind::kValidation: return SF_ERR_VALIDATION;
      case subfuse::ErrorKind::kParse: return SF_ERR_PARSE;
      case subfuse::ErrorKind::kIo: return SF_ERR_IO;
    }
    return SF_ERR_INTERNAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SF_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw ArgumentError{what};
}

std::string_view view(const char* data, size_t size) {
  if (data == nullptr && size != 0) throw ArgumentError{"null text with non-zero size"};
  return data == nullptr ? std::string_view{} : std::string_view(data, size);
}

void fill(sf_buffer* out, std::string_view text) {
  if (out == nullptr) return;
  char* data = static_cast<char*>(std::malloc(text.size() + 1));
  if (data == nullptr) throw std::bad_alloc();
  std::memcpy(data, text.data(), text.size());
  data[text.size()] = '\0';
  out->data = data;
  out->size = text.size();
}

void clear(sf_buffer* out) {
  if (out != nullptr) *out = sf_buffer{nullptr, 0};
}

const subfuse::NGramModel* model_of(const sf_lm* lm) { return lm == nullptr ? nullptr : &lm->model; }

}  // namespace

extern "C" {

const char* sf_version(void) { return SUBFUSE_VERSION; }

const char* sf_last_error(void) { return g_last_error.c_str(); }

void sf_buffer_free(sf_buffer* buffer) {
  if (buffer == nullptr) return;
  std::free(buffer->data);
  buffer->data = nullptr;
  buffer->size = 0;
}

sf_status sf_config_new(sf_config** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new sf_config();
  });
}

void sf_config_free(sf_config* config) { delete config; }

sf_status sf_config_load(sf_config* config, const char* text, size_t size) {
  return guarded([&] {
    require(config, "config is null");
    subfuse::PipelineConfig next = config->config;
    next.load(view(text, size));
    config->config = std::move(next);
  });
}

sf_status sf_config_set(sf_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config is null");
    require(key, "key is null");
    require(value, "value is null");
    config->config.set(key, value);
  });
}

sf_status sf_config_get(const sf_config* config, const char* key, sf_buffer* out) {
  clear(out);
  return guarded([&] {
    require(config, "config is null");
    require(key, "key is null");
    require(out, "out is null");
    fill(out, config->config.get(key));
  });
}

sf_status sf_config_set_syllable_table(sf_config* config, const char* tsv, size_t size) {
  return guarded([&] {
    require(config, "config is null");
    config->table = subfuse::SyllableTable::parse(view(tsv, size));
  });
}

sf_status sf_lm_train(const sf_config* config, const char* corpus, size_t size, sf_lm** out) {
  return guarded([&] {
    require(config, "config is null");
    require(out, "out is null");
    *out = nullptr;
    auto lm = std::make_unique<sf_lm>();
    lm->model = subfuse::train_lm_text(view(corpus, size), config->config.lm_order,
                                       config->config.backoff_alpha);
    *out = lm.release();
  });
}

sf_status sf_lm_read_arpa(const char* text, size_t size, sf_lm** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = nullptr;
    auto lm = std::make_unique<sf_lm>();
    lm->model = subfuse::read_arpa(view(text, size));
    *out = lm.release();
  });
}

sf_status sf_lm_write_arpa(const sf_lm* lm, sf_buffer* out) {
  clear(out);
  return guarded([&] {
    require(lm, "lm is null");
    require(out, "out is null");
    fill(out, subfuse::write_arpa(lm->model));
  });
}

sf_status sf_lm_score(const sf_lm* lm, const char* text, size_t size, double* out) {
  return guarded([&] {
    require(lm, "lm is null");
    require(out, "out is null");
    *out = subfuse::score_text(lm->model, view(text, size));
  });
}

void sf_lm_free(sf_lm* lm) { delete lm; }

sf_status sf_track(const sf_config* config, const char* ocr, size_t size, sf_buffer* tracks) {
  clear(tracks);
  return guarded([&] {
    require(config, "config is null");
    require(tracks, "tracks is null");
    const auto batch = subfuse::parse_ocr_batch(view(ocr, size));
    fill(tracks, subfuse::write_tracks_batch(subfuse::track_batch(batch, config->config),
                                             batch.array_form));
  });
}

sf_status sf_extract(const sf_config* config, const char* ocr, size_t size, sf_buffer* timelines) {
  clear(timelines);
  return guarded([&] {
    require(config, "config is null");
    require(timelines, "timelines is null");
    const auto batch = subfuse::parse_ocr_batch(view(ocr, size));
    fill(timelines, subfuse::write_timeline_batch(subfuse::extract_batch(batch, config->config)));
  });
}

sf_status sf_timeline_count(const char* timelines, size_t size, size_t* count) {
  return guarded([&] {
    require(count, "count is null");
    *count = subfuse::parse_timeline_batch(view(timelines, size)).items.size();
  });
}

sf_status sf_timeline_srt(const char* timelines, size_t size, size_t index, sf_buffer* video_id,
                          sf_buffer* srt) {
  clear(video_id);
  clear(srt);
  return guarded([&] {
    require(srt, "srt is null");
    const auto batch = subfuse::parse_timeline_batch(view(timelines, size));
    if (index >= batch.items.size()) subfuse::fail_validation("timeline index out of range");
    fill(video_id, batch.items[index].video_id);
    fill(srt, subfuse::write_srt(batch.items[index]));
  });
}

sf_status sf_decode(const sf_config* config, const char* emissions, size_t size,
                    const sf_lm* universal, const sf_lm* domain, sf_buffer* nbest) {
  clear(nbest);
  return guarded([&] {
    require(config, "config is null");
    require(nbest, "nbest is null");
    bool array_form = false;
    const auto batch = subfuse::parse_emission_batch(view(emissions, size), &array_form);
    const auto results =
        subfuse::decode_batch(batch, config->config, model_of(universal), model_of(domain));
    fill(nbest, subfuse::write_decode_batch(results, array_form));
  });
}

sf_status sf_fuse(const sf_config* config, const char* visual, size_t visual_size,
                  const char* asr, size_t asr_size, const sf_lm* universal, const sf_lm* domain,
                  sf_buffer* timelines, sf_buffer* audit) {
  clear(timelines);
  clear(audit);
  return guarded([&] {
    require(config, "config is null");
    require(timelines, "timelines is null");
    const auto v = subfuse::parse_timeline_batch(view(visual, visual_size));
    const auto a = subfuse::parse_asr_batch(view(asr, asr_size));
    const auto r = subfuse::fuse_batch(v, a, config->config, model_of(universal),
                                       model_of(domain), config->syllables());
    const std::string doc = subfuse::write_timeline_batch(r.timelines);
    const std::string audit_doc = subfuse::write_audit_batch(r.audits, v.array_form);
    fill(timelines, doc);
    fill(audit, audit_doc);
  });
}

sf_status sf_eval(const sf_config* config, const char* ref, size_t ref_size, const char* hyp,
                  size_t hyp_size, sf_buffer* report, sf_buffer* table) {
  clear(report);
  clear(table);
  return guarded([&] {
    require(config, "config is null");
    require(report, "report is null");
    const auto r = subfuse::parse_timeline_batch(view(ref, ref_size));
    const auto h = subfuse::parse_timeline_batch(view(hyp, hyp_size));
    const auto rep = subfuse::eval_batch(r, h, config->config.aggregation);
    fill(report, rep.to_json());
    fill(table, rep.to_table());
  });
}

sf_status sf_synth(const char* profile, size_t profile_size, const uint64_t* seed, size_t videos,
                   size_t lines_per_video, const char* pool, size_t pool_size, sf_buffer* ocr,
                   sf_buffer* asr, sf_buffer* truth) {
  clear(ocr);
  clear(asr);
  clear(truth);
  return guarded([&] {
    require(ocr, "ocr is null");
    require(asr, "asr is null");
    require(truth, "truth is null");
    subfuse::NoiseProfile p = profile == nullptr
                                  ? subfuse::NoiseProfile{}
                                  : subfuse::NoiseProfile::parse_json(view(profile, profile_size));
    if (seed != nullptr) p.seed = *seed;
    if (videos == 0 || lines_per_video == 0) {
      subfuse::fail_validation("videos and lines per video must be positive");
    }
    const std::vector<std::string> sentences =
        pool == nullptr ? subfuse::builtin_sentences()
                        : subfuse::parse_sentence_pool(view(pool, pool_size));
    const auto corpus = subfuse::generate_dataset(sentences, videos, lines_per_video, p);
    const std::string o = subfuse::write_ocr_batch(corpus.ocr_batch());
    const std::string a = subfuse::write_asr_batch(corpus.asr_batch());
    const std::string t = subfuse::write_timeline_batch(corpus.truth_batch());
    fill(ocr, o);
    fill(asr, a);
    fill(truth, t);
  });
}

sf_status sf_char_similarity(const char* a, const char* b, double* out) {
  return guarded([&] {
    require(a, "a is null");
    require(b, "b is null");
    require(out, "out is null");
    *out = subfuse::char_similarity_utf8(a, b);
  });
}

sf_status sf_cer(const char* ref, const char* hyp, double* out) {
  return guarded([&] {
    require(ref, "ref is null");
    require(hyp, "hyp is null");
    require(out, "out is null");
    *out = subfuse::cer(ref, hyp);
  });
}

}  // extern "C"
