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

#ifndef SUBFUSE_SUBFUSE_H_
#define SUBFUSE_SUBFUSE_H_

/*
 * C interface to the subtitle extraction and audio-visual fusion library.
 *
 * Every call returns an sf_status; on failure sf_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Documents are passed as UTF-8 JSON text. Output buffers are owned by the
 * caller and released with sf_buffer_free. The library never touches the
 * file system.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(SUBFUSE_BUILDING_LIBRARY)
#define SF_API __attribute__((visibility("default")))
#else
#define SF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_VALIDATION = 1, /* input violates a documented constraint */
  SF_ERR_PARSE = 2,      /* malformed JSON, ARPA or config text */
  SF_ERR_IO = 3,
  SF_ERR_ARGUMENT = 4,   /* null handle or pointer */
  SF_ERR_INTERNAL = 5
} sf_status;

typedef struct sf_buffer {
  char* data; /* NUL-terminated for convenience; size excludes the NUL */
  size_t size;
} sf_buffer;

typedef struct sf_config sf_config;
typedef struct sf_lm sf_lm;

SF_API const char* sf_version(void);
SF_API const char* sf_last_error(void);
SF_API void sf_buffer_free(sf_buffer* buffer);

SF_API sf_status sf_config_new(sf_config** out);
SF_API void sf_config_free(sf_config* config);
/* Applies a "key = value" text with '#' comments. */
SF_API sf_status sf_config_load(sf_config* config, const char* text, size_t size);
SF_API sf_status sf_config_set(sf_config* config, const char* key, const char* value);
SF_API sf_status sf_config_get(const sf_config* config, const char* key, sf_buffer* out);
/* Replaces the bundled character-to-syllable table (tab-separated). */
SF_API sf_status sf_config_set_syllable_table(sf_config* config, const char* tsv, size_t size);

/* Trains with the config's lm_order and backoff_alpha; one line per sentence. */
SF_API sf_status sf_lm_train(const sf_config* config, const char* corpus, size_t size,
                             sf_lm** out);
SF_API sf_status sf_lm_read_arpa(const char* text, size_t size, sf_lm** out);
SF_API sf_status sf_lm_write_arpa(const sf_lm* lm, sf_buffer* out);
/* Mean per-token log10 score. */
SF_API sf_status sf_lm_score(const sf_lm* lm, const char* text, size_t size, double* out);
SF_API void sf_lm_free(sf_lm* lm);

SF_API sf_status sf_track(const sf_config* config, const char* ocr, size_t size,
                          sf_buffer* tracks);
SF_API sf_status sf_extract(const sf_config* config, const char* ocr, size_t size,
                            sf_buffer* timelines);

/* Number of videos in a timeline document, and the SRT of one of them. */
SF_API sf_status sf_timeline_count(const char* timelines, size_t size, size_t* count);
SF_API sf_status sf_timeline_srt(const char* timelines, size_t size, size_t index,
                                 sf_buffer* video_id, sf_buffer* srt);

/* Either LM may be null. */
SF_API sf_status sf_decode(const sf_config* config, const char* emissions, size_t size,
                           const sf_lm* universal, const sf_lm* domain, sf_buffer* nbest);
SF_API sf_status sf_fuse(const sf_config* config, const char* visual, size_t visual_size,
                         const char* asr, size_t asr_size, const sf_lm* universal,
                         const sf_lm* domain, sf_buffer* timelines, sf_buffer* audit);
/* `table` may be null. */
SF_API sf_status sf_eval(const sf_config* config, const char* ref, size_t ref_size,
                         const char* hyp, size_t hyp_size, sf_buffer* report,
                         sf_buffer* table);

/* `seed` overrides the profile's seed when non-null; `pool` (one sentence
 * per line, '#' comments) replaces the bundled sentences when non-null. */
SF_API sf_status sf_synth(const char* profile, size_t profile_size, const uint64_t* seed,
                          size_t videos, size_t lines_per_video, const char* pool,
                          size_t pool_size, sf_buffer* ocr, sf_buffer* asr,
                          sf_buffer* truth);

SF_API sf_status sf_char_similarity(const char* a, const char* b, double* out);
SF_API sf_status sf_cer(const char* ref, const char* hyp, double* out);

#ifdef __cplusplus
}
#endif

#endif  /* SUBFUSE_SUBFUSE_H_ */
