/*
 * Copyright 2026 The meshtopo Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MESHTOPO_MESHTOPO_H_
#define MESHTOPO_MESHTOPO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MESHTOPO_BUILDING)
#define MT_API __declspec(dllexport)
#else
#define MT_API __declspec(dllimport)
#endif
#else
#define MT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns MT_OK or an error status; the message of the most recent
 * failure on the calling thread is available from mt_last_error(). Output
 * handles are only written on success. Strings and arrays returned by the
 * library are released with mt_free(). */
typedef enum mt_status {
  MT_OK = 0,
  MT_ERR_IO = 1,
  MT_ERR_PARSE = 2,
  MT_ERR_UNSUPPORTED_FACE = 3,
  MT_ERR_INDEX = 4,
  MT_ERR_DOMAIN = 5,
  MT_ERR_DEGENERATE = 6,
  MT_ERR_PRECONDITION = 7,
  MT_ERR_DECODE = 8,
  MT_ERR_CONSISTENCY = 9,
  MT_ERR_MASK_EMPTY = 10,
  MT_ERR_NUMERIC = 11,
  MT_ERR_TOPOLOGY = 12,
  MT_ERR_NO_PATH = 13,
  MT_ERR_INVALID_PATH = 14,
  MT_ERR_FRAMING = 15,
  MT_ERR_INVALID_ARGUMENT = 16,
  MT_ERR_INTERNAL = 99
} mt_status;

MT_API const char* mt_version(void);
MT_API const char* mt_status_name(mt_status status);
MT_API const char* mt_last_error(void);
MT_API void mt_free(void* ptr);

/* ---- meshes and point clouds ---- */

typedef struct mt_mesh mt_mesh; /* positions, faces and optional per-vertex uvs */
typedef struct mt_cloud mt_cloud;

MT_API mt_status mt_mesh_load_obj(const char* path, mt_mesh** out);
/* Keeps `vt` records; every distinct (position, uv) pair becomes a vertex. */
MT_API mt_status mt_mesh_load_uv_obj(const char* path, mt_mesh** out);
/* Writes `vt` records when the mesh carries uvs. */
MT_API mt_status mt_mesh_save_obj(const mt_mesh* mesh, const char* path);
/* `corners` holds the face indices back to back; `arity[f]` is 3 or 4. */
MT_API mt_status mt_mesh_create(const double* xyz, size_t vertex_count, const int32_t* corners,
                                const uint8_t* arity, size_t face_count, mt_mesh** out);
MT_API size_t mt_mesh_vertex_count(const mt_mesh* mesh);
MT_API size_t mt_mesh_face_count(const mt_mesh* mesh);
MT_API int mt_mesh_has_uvs(const mt_mesh* mesh);
/* Copies 3 * vertex_count doubles. */
MT_API mt_status mt_mesh_vertices(const mt_mesh* mesh, double* xyz);
MT_API mt_status mt_mesh_normalize(const mt_mesh* mesh, mt_mesh** out);
MT_API mt_status mt_mesh_surface_area(const mt_mesh* mesh, double* area);

typedef struct mt_topology {
  int euler;
  size_t boundary_loops;
  size_t boundary_edges;
  size_t edges;
  size_t charts;
  size_t disk_charts;
} mt_topology;

MT_API mt_status mt_mesh_topology(const mt_mesh* mesh, mt_topology* out);
MT_API void mt_mesh_free(mt_mesh* mesh);

MT_API mt_status mt_cloud_load_xyz(const char* path, mt_cloud** out);
MT_API mt_status mt_cloud_save_xyz(const mt_cloud* cloud, const char* path);
MT_API mt_status mt_cloud_create(const double* xyz, size_t count, mt_cloud** out);
MT_API size_t mt_cloud_size(const mt_cloud* cloud);
MT_API mt_status mt_mesh_sample_surface(const mt_mesh* mesh, size_t count, uint64_t seed,
                                        mt_cloud** out);
MT_API void mt_cloud_free(mt_cloud* cloud);

/* ---- tokenization ---- */

typedef struct mt_bpt_config {
  int levels;
  int blocks_per_axis;
  int offsets_per_axis;
} mt_bpt_config;

MT_API void mt_bpt_config_default(mt_bpt_config* cfg);
MT_API int32_t mt_bpt_vocab_size(const mt_bpt_config* cfg);

typedef struct mt_tokens mt_tokens;

/* Canonicalizes the mesh, then encodes it. `dropped_faces` (nullable)
 * receives the number of faces that collapsed during canonicalization. */
MT_API mt_status mt_tokenize(const mt_mesh* mesh, const mt_bpt_config* cfg, mt_tokens** out,
                             size_t* dropped_faces);
/* Wraps raw tokens (no span structure), e.g. sampled ones, for decoding. */
MT_API mt_status mt_tokens_create(const int32_t* tokens, size_t count, const mt_bpt_config* cfg,
                                  mt_tokens** out);
MT_API mt_status mt_detokenize(const mt_tokens* tokens, const mt_bpt_config* cfg,
                               mt_mesh** out);
/* *equal = 1 when decoding reproduces the canonical form of `mesh`. */
MT_API mt_status mt_tokens_verify(const mt_tokens* tokens, const mt_mesh* mesh,
                                  const mt_bpt_config* cfg, int* equal);
MT_API size_t mt_tokens_size(const mt_tokens* tokens);
MT_API size_t mt_tokens_face_count(const mt_tokens* tokens);
MT_API size_t mt_tokens_patch_count(const mt_tokens* tokens);
MT_API const int32_t* mt_tokens_data(const mt_tokens* tokens);
MT_API int32_t mt_tokens_vocab_size(const mt_tokens* tokens);
MT_API const char* mt_tokens_id(const mt_tokens* tokens);
MT_API mt_status mt_tokens_compression_ratio(const mt_tokens* tokens, const mt_mesh* mesh,
                                             double* ratio);
MT_API mt_status mt_tokens_window(const mt_tokens* tokens, size_t max_faces, size_t start_face,
                                  mt_tokens** out);
/* One JSON-lines record {"id", "vocab", "tokens", "patch_spans", "face_spans"}. */
MT_API mt_status mt_tokens_to_json(const mt_tokens* tokens, const char* id, char** json);
MT_API mt_status mt_tokens_from_json(const char* json, mt_tokens** out);
MT_API void mt_tokens_free(mt_tokens* tokens);

/* ---- metrics and preferences ---- */

typedef struct mt_report {
  double ber;
  double ts;
  double hd;
  size_t nonmanifold_edges;
} mt_report;

MT_API mt_status mt_evaluate(const mt_mesh* mesh, const mt_cloud* cloud, size_t samples,
                             uint64_t seed, mt_report* out);
/* {"id", "ber", "ts", "hd"} plus "cond" when `cond` is non-empty. */
MT_API mt_status mt_report_to_json(const mt_report* report, const char* id, const char* cond,
                                   char** json);
MT_API int mt_dominates(const mt_report* a, const mt_report* b);

typedef struct mt_mask_config {
  double tau_quad;
  double tau_topo;
} mt_mask_config;

MT_API void mt_mask_config_default(mt_mask_config* cfg);

typedef struct mt_rank_summary {
  size_t triplets;
  size_t pairs;
  size_t conditions;
} mt_rank_summary;

/* `reports_path` is a JSON-lines file or a directory of *.json / *.jsonl
 * reports; `tokens_path` likewise for token records. Writes triplet JSON-lines
 * to `*jsonl`. */
MT_API mt_status mt_rank(const char* reports_path, const char* tokens_path,
                         const char* default_cond, const mt_mask_config* mask_cfg,
                         const mt_bpt_config* bpt_cfg, char** jsonl, mt_rank_summary* summary);
/* Mask records {"id", "mask"} for every token record in `tokens_path`. */
MT_API mt_status mt_mask(const char* tokens_path, const mt_mask_config* mask_cfg,
                         const mt_bpt_config* bpt_cfg, char** jsonl, size_t* records);

/* ---- toy model and training ---- */

typedef struct mt_model mt_model;

typedef struct mt_model_shape {
  int vocab_size;
  int embed_dim;
  int context;
  int layers;
  int cond_dim;
} mt_model_shape;

MT_API void mt_model_shape_default(mt_model_shape* shape);
MT_API mt_status mt_model_random(const mt_model_shape* shape, uint64_t seed, double scale,
                                 mt_model** out);
MT_API mt_status mt_model_load(const char* path, mt_model** out);
MT_API mt_status mt_model_save(const mt_model* model, const char* path);
MT_API mt_status mt_model_clone(const mt_model* model, mt_model** out);
MT_API void mt_model_get_shape(const mt_model* model, mt_model_shape* shape);
MT_API size_t mt_model_parameter_count(const mt_model* model);
MT_API void mt_model_free(mt_model* model);

typedef struct mt_train_options {
  double lr;
  size_t steps;
  uint64_t seed;
  size_t max_faces; /* 0: whole sequences */
  unsigned threads;
  double beta;
  double epsilon_prob;
  const char* cloud_dir; /* nullable: conditions from <cloud_dir>/<cond>.xyz */
} mt_train_options;

MT_API void mt_train_options_default(mt_train_options* opts);

/* Called steps + 1 times: the loss before each update, then after the last. */
typedef void (*mt_step_callback)(size_t step, double loss, double margin, void* user);

MT_API mt_status mt_pretrain(mt_model* model, const char* corpus_path,
                             const mt_train_options* opts, mt_step_callback on_step,
                             void* user);
MT_API mt_status mt_mdpo_train(mt_model* policy, const mt_model* reference,
                               const char* triplets_path, const mt_train_options* opts,
                               mt_step_callback on_step, void* user);
/* M-DPO loss of one triplet record for a policy against a frozen reference. */
MT_API mt_status mt_mdpo_loss(const mt_model* policy, const mt_model* reference,
                              const char* triplet_json, double beta, double* loss);
/* Sliding-window sampling. `cond` may be NULL (zero condition); `stop_token`
 * < 0 disables stopping. `*tokens` is released with mt_free(). */
MT_API mt_status mt_generate(const mt_model* model, const mt_cloud* cond, size_t max_tokens,
                             size_t window, uint64_t seed, int32_t stop_token,
                             int32_t** tokens, size_t* count);

/* ---- seams and uv ---- */

typedef struct mt_seams mt_seams;

/* Plain text `x y z x y z` per segment, or JSON-lines {"id", "tokens"}
 * (first record). */
MT_API mt_status mt_seams_load(const char* path, int levels, mt_seams** out);
MT_API mt_status mt_seams_save_text(const mt_seams* seams, const char* path);
MT_API mt_status mt_seams_from_tokens(const int32_t* tokens, size_t count, int levels,
                                      mt_seams** out);
MT_API mt_status mt_seams_encode(const mt_seams* seams, int levels, int32_t** tokens,
                                 size_t* count);
MT_API mt_status mt_seams_to_json(const mt_seams* seams, const char* id, int levels,
                                  char** json);
MT_API size_t mt_seams_count(const mt_seams* seams);
MT_API mt_status mt_seam_ratio(const mt_seams* seams, const mt_mesh* mesh, double* ratio,
                               int* valid);
MT_API void mt_seams_free(mt_seams* seams);

MT_API mt_status mt_sample_structural(const mt_mesh* mesh, uint64_t seed,
                                      mt_cloud** vertex_points, mt_cloud** edge_points);

typedef struct mt_cut_report {
  size_t segments;
  size_t dropped_segments;
  size_t cut_edges;
  size_t duplicated_edges;
  size_t duplicated_vertices;
  size_t boundary_edges_before;
  size_t boundary_edges_after;
  size_t charts;
  size_t disk_charts;
} mt_cut_report;

MT_API mt_status mt_cut_seams(const mt_mesh* mesh, const mt_seams* seams, mt_mesh** out,
                              mt_cut_report* report);
/* Cuts along explicit vertex paths stored back to back in `vertices`. */
MT_API mt_status mt_cut_paths(const mt_mesh* mesh, const int32_t* vertices,
                              const size_t* path_lengths, size_t path_count, mt_mesh** out,
                              mt_cut_report* report);
/* Flattens every chart; the result carries uvs. Non-disk charts fail with
 * MT_ERR_TOPOLOGY. */
MT_API mt_status mt_flatten(const mt_mesh* mesh, unsigned threads, mt_mesh** out,
                            size_t* charts);

typedef struct mt_distortion {
  double mean;
  size_t faces;
  size_t degenerate_faces;
} mt_distortion;

/* `energies` (nullable) receives one value per triangle after the 0-2 split. */
MT_API mt_status mt_distortion_measure(const mt_mesh* mesh, mt_distortion* out,
                                       double** energies);

#ifdef __cplusplus
}
#endif

#endif /* MESHTOPO_MESHTOPO_H_ */
