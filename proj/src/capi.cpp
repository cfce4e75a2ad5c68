// Copyright 2026 The meshtopo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "meshtopo/meshtopo.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "meshtopo/error.hpp"
#include "meshtopo/metrics.hpp"
#include "meshtopo/pipeline.hpp"
#include "meshtopo/seam.hpp"
#include "meshtopo/serialize.hpp"

struct mt_mesh {
  meshtopo::UvMesh m;  // uvs empty when absent
};
struct mt_cloud {
  meshtopo::PointCloud c;
};
struct mt_tokens {
  std::string id;
  meshtopo::bpt::TokenSequence seq;
};
struct mt_model {
  meshtopo::mdpo::ToyARModel model;
};
struct mt_seams {
  meshtopo::seam::SeamSequence seq;
};

namespace {

using namespace meshtopo;

thread_local std::string g_last_error;

mt_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return MT_ERR_IO;
    case ErrorCode::kParse: return MT_ERR_PARSE;
    case ErrorCode::kUnsupportedFace: return MT_ERR_UNSUPPORTED_FACE;
    case ErrorCode::kIndex: return MT_ERR_INDEX;
    case ErrorCode::kDomain: return MT_ERR_DOMAIN;
    case ErrorCode::kDegenerate: return MT_ERR_DEGENERATE;
    case ErrorCode::kPrecondition: return MT_ERR_PRECONDITION;
    case ErrorCode::kDecode: return MT_ERR_DECODE;
    case ErrorCode::kConsistency: return MT_ERR_CONSISTENCY;
    case ErrorCode::kMaskEmpty: return MT_ERR_MASK_EMPTY;
    case ErrorCode::kNumeric: return MT_ERR_NUMERIC;
    case ErrorCode::kTopology: return MT_ERR_TOPOLOGY;
    case ErrorCode::kNoPath: return MT_ERR_NO_PATH;
    case ErrorCode::kInvalidPath: return MT_ERR_INVALID_PATH;
    case ErrorCode::kFraming: return MT_ERR_FRAMING;
    case ErrorCode::kInvalidArgument: return MT_ERR_INVALID_ARGUMENT;
  }
  return MT_ERR_INTERNAL;
}

template <typename Fn>
mt_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return MT_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, what);
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename T>
T* copy_array(const T* data, std::size_t n) {
  auto* out = static_cast<T*>(std::malloc(std::max<std::size_t>(n, 1) * sizeof(T)));
  if (out == nullptr) throw std::bad_alloc();
  if (n > 0) std::memcpy(out, data, n * sizeof(T));
  return out;
}

bpt::Config bpt_config(const mt_bpt_config* cfg) {
  bpt::Config out;
  if (cfg != nullptr) out = {cfg->levels, cfg->blocks_per_axis, cfg->offsets_per_axis};
  out.validate();
  return out;
}

preference::MaskConfig mask_config(const mt_mask_config* cfg) {
  preference::MaskConfig out;
  if (cfg != nullptr) out = {cfg->tau_quad, cfg->tau_topo};
  out.validate();
  return out;
}

QuantGrid grid_of(int levels) {
  QuantGrid grid{levels, -1.0, 1.0};
  grid.validate();
  return grid;
}

std::vector<Vec3> points_from(const double* xyz, std::size_t n) {
  std::vector<Vec3> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
  return out;
}

pipeline::TrainOptions train_options(const mt_train_options* opts) {
  mt_train_options o;
  mt_train_options_default(&o);
  if (opts != nullptr) o = *opts;
  pipeline::TrainOptions out;
  out.lr = o.lr;
  out.steps = o.steps;
  out.seed = o.seed;
  out.max_faces = o.max_faces;
  out.threads = o.threads == 0 ? 1 : o.threads;
  out.mdpo.beta = o.beta;
  out.mdpo.epsilon_prob = o.epsilon_prob;
  return out;
}

void fill_cut_report(const uv::CutReport& r, mt_cut_report* out) {
  out->cut_edges = r.cut_edges;
  out->duplicated_edges = r.duplicated_edges;
  out->duplicated_vertices = r.duplicated_vertices;
  out->boundary_edges_before = r.boundary_edges_before;
  out->boundary_edges_after = r.boundary_edges_after;
}

void count_charts(const Mesh& mesh, mt_cut_report* out) {
  out->charts = 0;
  out->disk_charts = 0;
  for (const auto& chart : uv::extract_charts(mesh)) {
    ++out->charts;
    if (chart.is_disk) ++out->disk_charts;
  }
}

}  // namespace

extern "C" {

const char* mt_version(void) { return "0.1.0"; }

const char* mt_status_name(mt_status status) {
  switch (status) {
    case MT_OK: return "ok";
    case MT_ERR_IO: return "io";
    case MT_ERR_PARSE: return "parse";
    case MT_ERR_UNSUPPORTED_FACE: return "unsupported-face";
    case MT_ERR_INDEX: return "index";
    case MT_ERR_DOMAIN: return "domain";
    case MT_ERR_DEGENERATE: return "degenerate";
    case MT_ERR_PRECONDITION: return "precondition";
    case MT_ERR_DECODE: return "decode";
    case MT_ERR_CONSISTENCY: return "consistency";
    case MT_ERR_MASK_EMPTY: return "mask-empty";
    case MT_ERR_NUMERIC: return "numeric";
    case MT_ERR_TOPOLOGY: return "topology";
    case MT_ERR_NO_PATH: return "no-path";
    case MT_ERR_INVALID_PATH: return "invalid-path";
    case MT_ERR_FRAMING: return "framing";
    case MT_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case MT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* mt_last_error(void) { return g_last_error.c_str(); }

void mt_free(void* ptr) { std::free(ptr); }

mt_status mt_mesh_load_obj(const char* path, mt_mesh** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new mt_mesh{{load_obj(path), {}}};
  });
}

mt_status mt_mesh_load_uv_obj(const char* path, mt_mesh** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new mt_mesh{load_uv_obj(path)};
  });
}

mt_status mt_mesh_save_obj(const mt_mesh* mesh, const char* path) {
  return guard([&] {
    require(mesh && path, "null argument");
    if (mesh->m.uvs.empty()) {
      save_obj(mesh->m.mesh, path);
    } else {
      save_uv_obj(mesh->m, path);
    }
  });
}

mt_status mt_mesh_create(const double* xyz, size_t vertex_count, const int32_t* corners,
                         const uint8_t* arity, size_t face_count, mt_mesh** out) {
  return guard([&] {
    require(out && (xyz || vertex_count == 0) && ((corners && arity) || face_count == 0),
            "null argument");
    Mesh mesh;
    mesh.vertices = points_from(xyz, vertex_count);
    std::size_t k = 0;
    for (std::size_t f = 0; f < face_count; ++f) {
      mesh.faces.emplace_back(corners + k, corners + k + arity[f]);
      k += arity[f];
    }
    validate(mesh);
    *out = new mt_mesh{{std::move(mesh), {}}};
  });
}

size_t mt_mesh_vertex_count(const mt_mesh* mesh) { return mesh ? mesh->m.mesh.vertices.size() : 0; }
size_t mt_mesh_face_count(const mt_mesh* mesh) { return mesh ? mesh->m.mesh.faces.size() : 0; }
int mt_mesh_has_uvs(const mt_mesh* mesh) { return mesh && !mesh->m.uvs.empty() ? 1 : 0; }

mt_status mt_mesh_vertices(const mt_mesh* mesh, double* xyz) {
  return guard([&] {
    require(mesh && xyz, "null argument");
    for (const Vec3& p : mesh->m.mesh.vertices) {
      *xyz++ = p.x;
      *xyz++ = p.y;
      *xyz++ = p.z;
    }
  });
}

mt_status mt_mesh_normalize(const mt_mesh* mesh, mt_mesh** out) {
  return guard([&] {
    require(mesh && out, "null argument");
    *out = new mt_mesh{{normalize_unit_cube(mesh->m.mesh), mesh->m.uvs}};
  });
}

mt_status mt_mesh_surface_area(const mt_mesh* mesh, double* area) {
  return guard([&] {
    require(mesh && area, "null argument");
    *area = surface_area(mesh->m.mesh);
  });
}

mt_status mt_mesh_topology(const mt_mesh* mesh, mt_topology* out) {
  return guard([&] {
    require(mesh && out, "null argument");
    const Mesh& m = mesh->m.mesh;
    const EdgeTopology topo = build_edge_topology(m);
    out->euler = uv::euler_characteristic(m);
    out->boundary_loops = uv::boundary_loops(m).size();
    out->boundary_edges = topo.boundary_edge_count();
    out->edges = topo.edges.size();
    mt_cut_report charts{};
    count_charts(m, &charts);
    out->charts = charts.charts;
    out->disk_charts = charts.disk_charts;
  });
}

void mt_mesh_free(mt_mesh* mesh) { delete mesh; }

mt_status mt_cloud_load_xyz(const char* path, mt_cloud** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new mt_cloud{load_xyz(path)};
  });
}

mt_status mt_cloud_save_xyz(const mt_cloud* cloud, const char* path) {
  return guard([&] {
    require(cloud && path, "null argument");
    save_xyz(cloud->c, path);
  });
}

mt_status mt_cloud_create(const double* xyz, size_t count, mt_cloud** out) {
  return guard([&] {
    require(out && (xyz || count == 0), "null argument");
    *out = new mt_cloud{{points_from(xyz, count)}};
  });
}

size_t mt_cloud_size(const mt_cloud* cloud) { return cloud ? cloud->c.points.size() : 0; }

mt_status mt_mesh_sample_surface(const mt_mesh* mesh, size_t count, uint64_t seed,
                                 mt_cloud** out) {
  return guard([&] {
    require(mesh && out, "null argument");
    *out = new mt_cloud{sample_surface(mesh->m.mesh, count, seed)};
  });
}

void mt_cloud_free(mt_cloud* cloud) { delete cloud; }

void mt_bpt_config_default(mt_bpt_config* cfg) {
  if (cfg == nullptr) return;
  const bpt::Config d;
  *cfg = {d.levels, d.blocks_per_axis, d.offsets_per_axis};
}

int32_t mt_bpt_vocab_size(const mt_bpt_config* cfg) {
  int32_t out = -1;
  guard([&] { out = bpt_config(cfg).vocab_size(); });
  return out;
}

mt_status mt_tokenize(const mt_mesh* mesh, const mt_bpt_config* cfg, mt_tokens** out,
                      size_t* dropped_faces) {
  return guard([&] {
    require(mesh && out, "null argument");
    auto result = pipeline::tokenize(mesh->m.mesh, bpt_config(cfg));
    if (dropped_faces != nullptr) *dropped_faces = result.canon.dropped_faces;
    *out = new mt_tokens{mesh->m.mesh.name, std::move(result.seq)};
  });
}

mt_status mt_tokens_create(const int32_t* tokens, size_t count, const mt_bpt_config* cfg,
                           mt_tokens** out) {
  return guard([&] {
    require(out && (tokens || count == 0), "null argument");
    bpt::TokenSequence seq;
    seq.tokens.assign(tokens, tokens + count);
    seq.vocab_size = bpt_config(cfg).vocab_size();
    *out = new mt_tokens{"", std::move(seq)};
  });
}

mt_status mt_detokenize(const mt_tokens* tokens, const mt_bpt_config* cfg, mt_mesh** out) {
  return guard([&] {
    require(tokens && out, "null argument");
    Mesh mesh = bpt::decode(tokens->seq, bpt_config(cfg));
    mesh.name = tokens->id;
    *out = new mt_mesh{{std::move(mesh), {}}};
  });
}

mt_status mt_tokens_verify(const mt_tokens* tokens, const mt_mesh* mesh,
                           const mt_bpt_config* cfg, int* equal) {
  return guard([&] {
    require(tokens && mesh && equal, "null argument");
    const auto c = bpt_config(cfg);
    *equal = same_mesh(bpt::decode(tokens->seq, c), canonicalize(mesh->m.mesh, c.grid())) ? 1 : 0;
  });
}

size_t mt_tokens_size(const mt_tokens* tokens) { return tokens ? tokens->seq.size() : 0; }
size_t mt_tokens_face_count(const mt_tokens* tokens) {
  return tokens ? tokens->seq.face_count() : 0;
}
size_t mt_tokens_patch_count(const mt_tokens* tokens) {
  return tokens ? tokens->seq.patch_spans.size() : 0;
}
const int32_t* mt_tokens_data(const mt_tokens* tokens) {
  return tokens ? tokens->seq.tokens.data() : nullptr;
}
int32_t mt_tokens_vocab_size(const mt_tokens* tokens) { return tokens ? tokens->seq.vocab_size : 0; }
const char* mt_tokens_id(const mt_tokens* tokens) { return tokens ? tokens->id.c_str() : ""; }

mt_status mt_tokens_compression_ratio(const mt_tokens* tokens, const mt_mesh* mesh,
                                      double* ratio) {
  return guard([&] {
    require(tokens && mesh && ratio, "null argument");
    *ratio = bpt::compression_ratio(tokens->seq, mesh->m.mesh);
  });
}

mt_status mt_tokens_window(const mt_tokens* tokens, size_t max_faces, size_t start_face,
                           mt_tokens** out) {
  return guard([&] {
    require(tokens && out, "null argument");
    *out = new mt_tokens{tokens->id, bpt::truncate_window(tokens->seq, max_faces, start_face)};
  });
}

mt_status mt_tokens_to_json(const mt_tokens* tokens, const char* id, char** json) {
  return guard([&] {
    require(tokens && json, "null argument");
    *json = copy_string(io::token_record({id ? id : tokens->id, {}, tokens->seq}));
  });
}

mt_status mt_tokens_from_json(const char* json, mt_tokens** out) {
  return guard([&] {
    require(json && out, "null argument");
    auto rec = io::parse_token_record(json);
    bpt::check_structure(rec.seq);
    *out = new mt_tokens{std::move(rec.id), std::move(rec.seq)};
  });
}

void mt_tokens_free(mt_tokens* tokens) { delete tokens; }

mt_status mt_evaluate(const mt_mesh* mesh, const mt_cloud* cloud, size_t samples,
                      uint64_t seed, mt_report* out) {
  return guard([&] {
    require(mesh && cloud && out, "null argument");
    const auto r = metrics::evaluate(mesh->m.mesh, cloud->c, samples, seed);
    *out = {r.ber, r.ts, r.hd, r.nonmanifold_edges};
  });
}

mt_status mt_report_to_json(const mt_report* report, const char* id, const char* cond,
                            char** json) {
  return guard([&] {
    require(report && json, "null argument");
    metrics::QualityReport r{id ? id : "", report->ber, report->ts, report->hd,
                             report->nonmanifold_edges};
    *json = copy_string(io::report_json(r, cond ? cond : ""));
  });
}

int mt_dominates(const mt_report* a, const mt_report* b) {
  if (a == nullptr || b == nullptr) return 0;
  return preference::dominates({"", a->ber, a->ts, a->hd, 0}, {"", b->ber, b->ts, b->hd, 0})
             ? 1
             : 0;
}

void mt_mask_config_default(mt_mask_config* cfg) {
  if (cfg == nullptr) return;
  const preference::MaskConfig d;
  *cfg = {d.tau_quad, d.tau_topo};
}

mt_status mt_rank(const char* reports_path, const char* tokens_path, const char* default_cond,
                  const mt_mask_config* mask_cfg, const mt_bpt_config* bpt_cfg, char** jsonl,
                  mt_rank_summary* summary) {
  return guard([&] {
    require(reports_path && tokens_path && jsonl, "null argument");
    const auto reports = pipeline::load_reports(reports_path);
    const auto tokens = pipeline::load_token_records(tokens_path);
    const auto result = pipeline::rank(reports, tokens, default_cond ? default_cond : "",
                                       mask_config(mask_cfg), bpt_config(bpt_cfg));
    std::string text;
    for (const auto& t : result.triplets) text += io::triplet_record(t) + "\n";
    *jsonl = copy_string(text);
    if (summary != nullptr) {
      *summary = {result.triplets.size(), result.pairs_compared, result.conditions};
    }
  });
}

mt_status mt_mask(const char* tokens_path, const mt_mask_config* mask_cfg,
                  const mt_bpt_config* bpt_cfg, char** jsonl, size_t* records) {
  return guard([&] {
    require(tokens_path && jsonl, "null argument");
    const auto mcfg = mask_config(mask_cfg);
    const auto bcfg = bpt_config(bpt_cfg);
    std::string text;
    const auto recs = pipeline::load_token_records(tokens_path);
    for (const auto& rec : recs) {
      try {
        const Mesh mesh = bpt::decode(rec.seq, bcfg);
        text += io::mask_record(rec.id, preference::mask_phi(rec.seq, mesh, mcfg, bcfg)) + "\n";
      } catch (const Error& e) {
        rethrow_with_context(e, "record \"" + rec.id + "\"");
      }
    }
    *jsonl = copy_string(text);
    if (records != nullptr) *records = recs.size();
  });
}

void mt_model_shape_default(mt_model_shape* shape) {
  if (shape == nullptr) return;
  const mdpo::ModelShape d;
  *shape = {d.vocab_size, d.embed_dim, d.context, d.layers, d.cond_dim};
}

mt_status mt_model_random(const mt_model_shape* shape, uint64_t seed, double scale,
                          mt_model** out) {
  return guard([&] {
    require(shape && out, "null argument");
    const mdpo::ModelShape s{shape->vocab_size, shape->embed_dim, shape->context, shape->layers,
                             shape->cond_dim};
    *out = new mt_model{mdpo::ToyARModel::random(s, seed, scale)};
  });
}

mt_status mt_model_load(const char* path, mt_model** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new mt_model{io::load_model(path)};
  });
}

mt_status mt_model_save(const mt_model* model, const char* path) {
  return guard([&] {
    require(model && path, "null argument");
    io::save_model(model->model, path);
  });
}

mt_status mt_model_clone(const mt_model* model, mt_model** out) {
  return guard([&] {
    require(model && out, "null argument");
    *out = new mt_model{model->model};
  });
}

void mt_model_get_shape(const mt_model* model, mt_model_shape* shape) {
  if (model == nullptr || shape == nullptr) return;
  const auto& s = model->model.shape();
  *shape = {s.vocab_size, s.embed_dim, s.context, s.layers, s.cond_dim};
}

size_t mt_model_parameter_count(const mt_model* model) {
  return model ? model->model.parameters().size() : 0;
}

void mt_model_free(mt_model* model) { delete model; }

void mt_train_options_default(mt_train_options* opts) {
  if (opts == nullptr) return;
  const pipeline::TrainOptions d;
  *opts = {d.lr, d.steps, d.seed, d.max_faces, d.threads, d.mdpo.beta, d.mdpo.epsilon_prob,
           nullptr};
}

mt_status mt_pretrain(mt_model* model, const char* corpus_path, const mt_train_options* opts,
                      mt_step_callback on_step, void* user) {
  return guard([&] {
    require(model && corpus_path, "null argument");
    const auto options = train_options(opts);
    const auto corpus = pipeline::load_token_records(corpus_path);
    mdpo::TrainState state{model->model, 0};
    pipeline::pretrain(
        state, corpus, options,
        pipeline::cloud_conditions(opts && opts->cloud_dir ? opts->cloud_dir : "",
                                   state.model.shape().cond_dim),
        [&](std::size_t step, const mdpo::StepResult& r) {
          if (on_step) on_step(step, r.loss, r.margin, user);
        });
    model->model = std::move(state.model);
  });
}

mt_status mt_mdpo_train(mt_model* policy, const mt_model* reference, const char* triplets_path,
                        const mt_train_options* opts, mt_step_callback on_step, void* user) {
  return guard([&] {
    require(policy && reference && triplets_path, "null argument");
    const auto options = train_options(opts);
    const auto triplets = pipeline::load_triplets(triplets_path);
    mdpo::TrainState state{policy->model, 0};
    pipeline::mdpo_train(
        state, reference->model, triplets, options,
        pipeline::cloud_conditions(opts && opts->cloud_dir ? opts->cloud_dir : "",
                                   state.model.shape().cond_dim),
        [&](std::size_t step, const mdpo::StepResult& r) {
          if (on_step) on_step(step, r.loss, r.margin, user);
        });
    policy->model = std::move(state.model);
  });
}

mt_status mt_mdpo_loss(const mt_model* policy, const mt_model* reference,
                       const char* triplet_json, double beta, double* loss) {
  return guard([&] {
    require(policy && reference && triplet_json && loss, "null argument");
    const auto t = io::parse_triplet(triplet_json);
    mdpo::MDPOConfig cfg;
    cfg.beta = beta;
    cfg.validate();
    *loss = mdpo::mdpo_loss(t, policy->model, reference->model, cfg,
                            mdpo::zero_condition(policy->model.shape().cond_dim));
  });
}

mt_status mt_generate(const mt_model* model, const mt_cloud* cond, size_t max_tokens,
                      size_t window, uint64_t seed, int32_t stop_token, int32_t** tokens,
                      size_t* count) {
  return guard([&] {
    require(model && tokens && count, "null argument");
    const int dim = model->model.shape().cond_dim;
    const auto c = cond ? mdpo::condition_from_cloud(cond->c, dim) : mdpo::zero_condition(dim);
    const auto out = mdpo::generate(model->model, c, max_tokens, window, seed,
                                    stop_token < 0 ? std::nullopt
                                                   : std::optional<std::int32_t>(stop_token));
    *tokens = copy_array(out.data(), out.size());
    *count = out.size();
  });
}

mt_status mt_seams_load(const char* path, int levels, mt_seams** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new mt_seams{pipeline::load_seams(path, grid_of(levels))};
  });
}

mt_status mt_seams_save_text(const mt_seams* seams, const char* path) {
  return guard([&] {
    require(seams && path, "null argument");
    std::ofstream file(path);
    if (!file) fail(ErrorCode::kIo, std::string("cannot write ") + path);
    seam::write_seams_text(file, seams->seq);
    if (!file) fail(ErrorCode::kIo, std::string("write failed: ") + path);
  });
}

mt_status mt_seams_from_tokens(const int32_t* tokens, size_t count, int levels,
                               mt_seams** out) {
  return guard([&] {
    require(out && (tokens || count == 0), "null argument");
    const std::vector<int> t(tokens, tokens + count);
    *out = new mt_seams{seam::decode_seam(t, grid_of(levels))};
  });
}

mt_status mt_seams_encode(const mt_seams* seams, int levels, int32_t** tokens, size_t* count) {
  return guard([&] {
    require(seams && tokens && count, "null argument");
    const auto t = seam::encode_seam(seams->seq, grid_of(levels));
    const std::vector<int32_t> out(t.begin(), t.end());
    *tokens = copy_array(out.data(), out.size());
    *count = out.size();
  });
}

mt_status mt_seams_to_json(const mt_seams* seams, const char* id, int levels, char** json) {
  return guard([&] {
    require(seams && json, "null argument");
    *json = copy_string(
        io::seam_record({id ? id : "", seam::encode_seam(seams->seq, grid_of(levels))}));
  });
}

size_t mt_seams_count(const mt_seams* seams) { return seams ? seams->seq.size() : 0; }

mt_status mt_seam_ratio(const mt_seams* seams, const mt_mesh* mesh, double* ratio, int* valid) {
  return guard([&] {
    require(seams && mesh && ratio && valid, "null argument");
    const auto r = seam::seam_ratio(seams->seq, mesh->m.mesh);
    *ratio = r.ratio;
    *valid = r.valid ? 1 : 0;
  });
}

void mt_seams_free(mt_seams* seams) { delete seams; }

mt_status mt_sample_structural(const mt_mesh* mesh, uint64_t seed, mt_cloud** vertex_points,
                               mt_cloud** edge_points) {
  return guard([&] {
    require(mesh && vertex_points && edge_points, "null argument");
    auto s = seam::sample_structural(mesh->m.mesh, seed);
    auto* v = new mt_cloud{{std::move(s.vertex_points)}};
    *edge_points = new mt_cloud{{std::move(s.edge_points)}};
    *vertex_points = v;
  });
}

mt_status mt_cut_seams(const mt_mesh* mesh, const mt_seams* seams, mt_mesh** out,
                       mt_cut_report* report) {
  return guard([&] {
    require(mesh && seams && out, "null argument");
    auto summary = pipeline::cut(mesh->m.mesh, seams->seq);
    if (report != nullptr) {
      fill_cut_report(summary.unwrap.cut.report, report);
      report->segments = summary.segments;
      report->dropped_segments = summary.unwrap.snap.dropped;
      report->charts = summary.charts;
      report->disk_charts = summary.disk_charts;
    }
    *out = new mt_mesh{{std::move(summary.unwrap.cut.mesh), {}}};
  });
}

mt_status mt_cut_paths(const mt_mesh* mesh, const int32_t* vertices, const size_t* path_lengths,
                       size_t path_count, mt_mesh** out, mt_cut_report* report) {
  return guard([&] {
    require(mesh && out && ((vertices && path_lengths) || path_count == 0), "null argument");
    std::vector<uv::EdgePath> paths;
    std::size_t k = 0;
    for (std::size_t p = 0; p < path_count; ++p) {
      paths.emplace_back(vertices + k, vertices + k + path_lengths[p]);
      k += path_lengths[p];
    }
    auto result = uv::cut_mesh(mesh->m.mesh, paths);
    if (report != nullptr) {
      *report = {};
      fill_cut_report(result.report, report);
      report->segments = path_count;
      count_charts(result.mesh, report);
    }
    *out = new mt_mesh{{std::move(result.mesh), {}}};
  });
}

mt_status mt_flatten(const mt_mesh* mesh, unsigned threads, mt_mesh** out, size_t* charts) {
  return guard([&] {
    require(mesh && out, "null argument");
    auto result = pipeline::flatten(mesh->m.mesh, threads == 0 ? 1 : threads);
    if (charts != nullptr) *charts = result.charts;
    *out = new mt_mesh{std::move(result.mesh)};
  });
}

mt_status mt_distortion_measure(const mt_mesh* mesh, mt_distortion* out, double** energies) {
  return guard([&] {
    require(mesh && out, "null argument");
    const auto d = pipeline::distortion(mesh->m);
    *out = {d.mean, d.energies.size(), d.degenerate_faces.size()};
    if (energies != nullptr) *energies = copy_array(d.energies.data(), d.energies.size());
  });
}

}  // extern "C"
