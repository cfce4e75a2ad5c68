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

// meshtopo command line tool. Machine-readable JSON goes to stdout,
// diagnostics to stderr. Exit status: 0 success, 2 bad input or usage,
// 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "meshtopo/meshtopo.h"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct Failure : std::runtime_error {
  Failure(int code, const std::string& what) : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

[[noreturn]] void usage_error(const std::string& what) { throw Failure(kExitInput, what); }

void check(mt_status status, const std::string& context) {
  if (status == MT_OK) return;
  const int code = status == MT_ERR_NUMERIC ? kExitNumeric : kExitInput;
  throw Failure(code, context + ": " + mt_status_name(status) + ": " + mt_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Mesh = std::unique_ptr<mt_mesh, Deleter<mt_mesh, mt_mesh_free>>;
using Cloud = std::unique_ptr<mt_cloud, Deleter<mt_cloud, mt_cloud_free>>;
using Tokens = std::unique_ptr<mt_tokens, Deleter<mt_tokens, mt_tokens_free>>;
using Model = std::unique_ptr<mt_model, Deleter<mt_model, mt_model_free>>;
using Seams = std::unique_ptr<mt_seams, Deleter<mt_seams, mt_seams_free>>;

struct CString {
  char* p = nullptr;
  ~CString() { mt_free(p); }
  std::string str() const { return p ? p : ""; }
};

Mesh load_mesh(const std::string& path) {
  mt_mesh* m = nullptr;
  check(mt_mesh_load_obj(path.c_str(), &m), path);
  return Mesh(m);
}

Cloud load_cloud(const std::string& path) {
  mt_cloud* c = nullptr;
  check(mt_cloud_load_xyz(path.c_str(), &c), path);
  return Cloud(c);
}

Model load_model(const std::string& path) {
  mt_model* m = nullptr;
  check(mt_model_load(path.c_str(), &m), path);
  return Model(m);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage_error("cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) usage_error("cannot write " + path);
  out << text;
  if (!out) usage_error("write failed: " + path);
}

// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

struct BptOptions {
  int levels = 1024;
  int blocks = 16;

  void add(CLI::App* app) {
    app->add_option("--levels", levels, "Quantization levels per axis")->capture_default_str();
    app->add_option("--blocks", blocks, "Blocks per axis")->capture_default_str();
  }
  mt_bpt_config config() const {
    if (blocks <= 0 || levels % blocks != 0) {
      usage_error("--levels must be a multiple of --blocks");
    }
    return {levels, blocks, levels / blocks};
  }
};

struct MaskOptions {
  double tau_quad = 0.8;
  double tau_topo = 0.5;

  void add(CLI::App* app) {
    app->add_option("--tau-quad", tau_quad, "Patch quad-ratio threshold")->capture_default_str();
    app->add_option("--tau-topo", tau_topo, "Patch mean face-score threshold")
        ->capture_default_str();
  }
  mt_mask_config config() const { return {tau_quad, tau_topo}; }
};

// ---- tokenize / detokenize ----

struct TokenizeArgs {
  std::string input, out, id;
  BptOptions bpt;
  bool normalize = false;
  bool verify = false;
};

void run_tokenize(const TokenizeArgs& a) {
  Mesh mesh = load_mesh(a.input);
  if (a.normalize) {
    mt_mesh* n = nullptr;
    check(mt_mesh_normalize(mesh.get(), &n), a.input);
    mesh.reset(n);
  }
  const auto cfg = a.bpt.config();
  mt_tokens* t = nullptr;
  std::size_t dropped = 0;
  check(mt_tokenize(mesh.get(), &cfg, &t, &dropped), a.input);
  Tokens tokens(t);
  if (dropped > 0) std::cerr << "warning: " << dropped << " faces collapsed and were dropped\n";

  mt_mesh* c = nullptr;
  check(mt_detokenize(tokens.get(), &cfg, &c), a.input);
  Mesh canonical(c);
  if (a.verify) {
    int equal = 0;
    check(mt_tokens_verify(tokens.get(), mesh.get(), &cfg, &equal), a.input);
    if (!equal) throw Failure(kExitInput, a.input + ": roundtrip mismatch");
    std::cerr << "roundtrip OK\n";
  }
  const std::string id = a.id.empty() ? fs::path(a.input).stem().string() : a.id;
  CString record;
  check(mt_tokens_to_json(tokens.get(), id.c_str(), &record.p), a.input);
  emit(a.out, record.str() + "\n");
  if (mt_tokens_size(tokens.get()) > 0) {
    double ratio = 0.0;
    check(mt_tokens_compression_ratio(tokens.get(), canonical.get(), &ratio), a.input);
    std::cerr << id << ": " << mt_tokens_size(tokens.get()) << " tokens, "
              << mt_tokens_face_count(tokens.get()) << " faces, "
              << mt_tokens_patch_count(tokens.get()) << " patches, compression " << ratio
              << "\n";
  }
}

struct DetokenizeArgs {
  std::string input, out, id;
  BptOptions bpt;
};

void run_detokenize(const DetokenizeArgs& a) {
  const auto cfg = a.bpt.config();
  for (const auto& line : read_lines(a.input)) {
    mt_tokens* t = nullptr;
    check(mt_tokens_from_json(line.c_str(), &t), a.input);
    Tokens tokens(t);
    if (!a.id.empty() && a.id != mt_tokens_id(tokens.get())) continue;
    mt_mesh* m = nullptr;
    check(mt_detokenize(tokens.get(), &cfg, &m), a.input);
    Mesh mesh(m);
    check(mt_mesh_save_obj(mesh.get(), a.out.c_str()), a.out);
    std::cout << json{{"id", mt_tokens_id(tokens.get())},
                      {"vertices", mt_mesh_vertex_count(mesh.get())},
                      {"faces", mt_mesh_face_count(mesh.get())}}
                     .dump()
              << "\n";
    return;
  }
  usage_error(a.input + ": no record" + (a.id.empty() ? "" : " with id \"" + a.id + "\""));
}

// ---- evaluate / rank / mask ----

struct EvaluateArgs {
  std::string mesh, cloud, out, id, cond;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};

void run_evaluate(const EvaluateArgs& a) {
  Mesh mesh = load_mesh(a.mesh);
  Cloud cloud = load_cloud(a.cloud);
  mt_report report{};
  check(mt_evaluate(mesh.get(), cloud.get(), a.samples, a.seed, &report), a.mesh);
  const std::string id = a.id.empty() ? fs::path(a.mesh).stem().string() : a.id;
  CString text;
  check(mt_report_to_json(&report, id.c_str(), a.cond.c_str(), &text.p), a.mesh);
  if (!a.out.empty()) write_text(a.out, text.str() + "\n");
  std::cout << text.str() << "\n";
  if (report.nonmanifold_edges > 0) {
    std::cerr << "warning: " << report.nonmanifold_edges << " non-manifold edges\n";
  }
}

struct RankArgs {
  std::string reports, tokens, out, cond = "default";
  MaskOptions mask;
  BptOptions bpt;
};

void run_rank(const RankArgs& a) {
  const auto mcfg = a.mask.config();
  const auto bcfg = a.bpt.config();
  CString jsonl;
  mt_rank_summary summary{};
  check(mt_rank(a.reports.c_str(), a.tokens.c_str(), a.cond.c_str(), &mcfg, &bcfg, &jsonl.p,
                &summary),
        "rank");
  if (a.out.empty()) {
    std::cout << jsonl.str();
  } else {
    write_text(a.out, jsonl.str());
    std::cout << json{{"triplets", summary.triplets},
                      {"pairs", summary.pairs},
                      {"conditions", summary.conditions}}
                     .dump()
              << "\n";
  }
  std::cerr << summary.triplets << " triplets from " << summary.pairs << " pairs\n";
}

struct MaskArgs {
  std::string tokens, out;
  MaskOptions mask;
  BptOptions bpt;
};

void run_mask(const MaskArgs& a) {
  const auto mcfg = a.mask.config();
  const auto bcfg = a.bpt.config();
  CString jsonl;
  std::size_t records = 0;
  check(mt_mask(a.tokens.c_str(), &mcfg, &bcfg, &jsonl.p, &records), "mask");
  emit(a.out, jsonl.str());
  std::cerr << records << " mask records\n";
}

// ---- train / generate ----

struct TrainArgs {
  std::string mode, data, model_in, model_out, reference, log, cloud_dir;
  double lr = 0.05;
  std::size_t steps = 100;
  double beta = 0.1;
  std::uint64_t seed = 0;
  std::size_t max_faces = 0;
  unsigned threads = 1;
  std::optional<int> vocab;
  mt_model_shape shape{};
  double init_scale = 0.1;
};

int first_record_vocab(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) usage_error(path + ": empty corpus");
  const json j = json::parse(lines.front(), nullptr, false);
  if (!j.is_object() || !j.contains("vocab")) usage_error(path + ":1: missing \"vocab\"");
  return j["vocab"].get<int>();
}

struct LogSink {
  std::ostream* out;
  std::vector<std::pair<double, double>> seen;
};

void log_step(std::size_t step, double loss, double margin, void* user) {
  auto* sink = static_cast<LogSink*>(user);
  *sink->out << json{{"step", step}, {"loss", loss}, {"margin", margin}}.dump() << "\n";
  sink->seen.emplace_back(loss, margin);
}

void run_train(const TrainArgs& a) {
  if (!(a.lr > 0.0)) usage_error("--lr must be positive");
  if (!(a.beta > 0.0)) usage_error("--beta must be positive");
  mt_train_options opts;
  mt_train_options_default(&opts);
  opts.lr = a.lr;
  opts.steps = a.steps;
  opts.seed = a.seed;
  opts.max_faces = a.max_faces;
  opts.threads = a.threads;
  opts.beta = a.beta;
  opts.cloud_dir = a.cloud_dir.empty() ? nullptr : a.cloud_dir.c_str();

  std::ofstream log_file;
  if (!a.log.empty()) {
    log_file.open(a.log);
    if (!log_file) usage_error("cannot write " + a.log);
  }
  LogSink sink{a.log.empty() ? &std::cout : &log_file, {}};

  Model model;
  if (a.mode == "pretrain") {
    if (!a.model_in.empty()) {
      model = load_model(a.model_in);
    } else {
      mt_model_shape shape = a.shape;
      shape.vocab_size = a.vocab ? *a.vocab : first_record_vocab(a.data);
      mt_model* m = nullptr;
      check(mt_model_random(&shape, a.seed, a.init_scale, &m), "model init");
      model.reset(m);
    }
    check(mt_pretrain(model.get(), a.data.c_str(), &opts, log_step, &sink), a.data);
  } else {
    if (a.reference.empty()) usage_error("--reference is required for mdpo");
    Model reference = load_model(a.reference);
    if (!a.model_in.empty()) {
      model = load_model(a.model_in);
    } else {
      mt_model* m = nullptr;
      check(mt_model_clone(reference.get(), &m), "policy init");
      model.reset(m);
    }
    check(mt_mdpo_train(model.get(), reference.get(), a.data.c_str(), &opts, log_step, &sink),
          a.data);
  }
  check(mt_model_save(model.get(), a.model_out.c_str()), a.model_out);
  if (!a.log.empty()) {
    std::cout << json{{"steps", a.steps},
                      {"parameters", mt_model_parameter_count(model.get())},
                      {"initial_loss", sink.seen.front().first},
                      {"final_loss", sink.seen.back().first},
                      {"final_margin", sink.seen.back().second}}
                     .dump()
              << "\n";
  }
  std::cerr << a.mode << ": loss " << sink.seen.front().first << " -> " << sink.seen.back().first
            << " after " << a.steps << " steps\n";
}

struct GenerateArgs {
  std::string model, cloud, out, id = "generated";
  std::size_t max_tokens = 64;
  std::size_t window = 0;
  std::uint64_t seed = 0;
  int stop_token = -1;
  BptOptions bpt;
};

void run_generate(const GenerateArgs& a) {
  Model model = load_model(a.model);
  Cloud cloud;
  if (!a.cloud.empty()) cloud = load_cloud(a.cloud);
  mt_model_shape shape{};
  mt_model_get_shape(model.get(), &shape);
  const std::size_t window = a.window == 0 ? static_cast<std::size_t>(shape.context) : a.window;
  if (window > static_cast<std::size_t>(shape.context)) {
    usage_error("--window exceeds the model context of " + std::to_string(shape.context));
  }
  int32_t* raw = nullptr;
  std::size_t count = 0;
  check(mt_generate(model.get(), cloud.get(), a.max_tokens, window, a.seed, a.stop_token, &raw,
                    &count),
        "generate");
  const std::vector<int32_t> tokens(raw, raw + count);
  mt_free(raw);

  json record = {{"id", a.id}, {"vocab", shape.vocab_size}, {"tokens", tokens}};
  // Report whether the sample is a decodable BPT sequence.
  const auto cfg = a.bpt.config();
  if (mt_bpt_vocab_size(&cfg) == shape.vocab_size) {
    mt_tokens* t = nullptr;
    check(mt_tokens_create(tokens.data(), tokens.size(), &cfg, &t), "generate");
    Tokens seq(t);
    mt_mesh* m = nullptr;
    if (mt_detokenize(seq.get(), &cfg, &m) == MT_OK) {
      record["faces"] = mt_mesh_face_count(m);
      mt_mesh_free(m);
    } else {
      record["faces"] = nullptr;
      std::cerr << "sample does not decode: " << mt_last_error() << "\n";
    }
  }
  emit(a.out, record.dump() + "\n");
}

// ---- seam ----

struct SeamArgs {
  std::string input, mesh, out, id;
  int levels = 1024;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool per_face = false;
};

Seams load_seams(const std::string& path, int levels) {
  mt_seams* s = nullptr;
  check(mt_seams_load(path.c_str(), levels, &s), path);
  return Seams(s);
}

json topology_json(const mt_mesh* mesh, const std::string& context) {
  mt_topology topo{};
  check(mt_mesh_topology(mesh, &topo), context);
  return {{"euler", topo.euler},
          {"boundary_loops", topo.boundary_loops},
          {"boundary_edges", topo.boundary_edges},
          {"charts", topo.charts},
          {"disk_charts", topo.disk_charts}};
}

void run_seam_encode(const SeamArgs& a) {
  Seams seams = load_seams(a.input, a.levels);
  const std::string id = a.id.empty() ? fs::path(a.input).stem().string() : a.id;
  CString record;
  check(mt_seams_to_json(seams.get(), id.c_str(), a.levels, &record.p), a.input);
  emit(a.out, record.str() + "\n");
  std::cerr << mt_seams_count(seams.get()) << " segments, "
            << 6 * mt_seams_count(seams.get()) << " tokens\n";
}

void run_seam_decode(const SeamArgs& a) {
  Seams seams = load_seams(a.input, a.levels);
  check(mt_seams_save_text(seams.get(), a.out.c_str()), a.out);
  std::cout << json{{"segments", mt_seams_count(seams.get())}}.dump() << "\n";
}

void run_seam_ratio(const SeamArgs& a) {
  Seams seams = load_seams(a.input, a.levels);
  Mesh mesh = load_mesh(a.mesh);
  double ratio = 0.0;
  int valid = 0;
  check(mt_seam_ratio(seams.get(), mesh.get(), &ratio, &valid), a.input);
  std::cout << json{{"segments", mt_seams_count(seams.get())},
                    {"vertices", mt_mesh_vertex_count(mesh.get())},
                    {"ratio", ratio},
                    {"valid", valid != 0}}
                   .dump()
            << "\n";
}

void run_seam_sample(const SeamArgs& a) {
  Mesh mesh = load_mesh(a.input);
  mt_cloud* v = nullptr;
  mt_cloud* e = nullptr;
  check(mt_sample_structural(mesh.get(), a.seed, &v, &e), a.input);
  Cloud vertex_points(v), edge_points(e);
  if (!a.out.empty()) {
    // Vertex points first, then edge points.
    const std::string tmp = a.out + ".edges";
    check(mt_cloud_save_xyz(vertex_points.get(), a.out.c_str()), a.out);
    check(mt_cloud_save_xyz(edge_points.get(), tmp.c_str()), tmp);
    std::ifstream edges(tmp);
    std::ofstream out(a.out, std::ios::app);
    out << edges.rdbuf();
    edges.close();
    fs::remove(tmp);
  }
  std::cout << json{{"vertex_points", mt_cloud_size(vertex_points.get())},
                    {"edge_points", mt_cloud_size(edge_points.get())}}
                   .dump()
            << "\n";
}

void run_seam_cut(const SeamArgs& a) {
  Mesh mesh = load_mesh(a.mesh);
  Seams seams = load_seams(a.input, a.levels);
  mt_mesh* c = nullptr;
  mt_cut_report r{};
  check(mt_cut_seams(mesh.get(), seams.get(), &c, &r), a.mesh);
  Mesh cut(c);
  check(mt_mesh_save_obj(cut.get(), a.out.c_str()), a.out);
  if (r.dropped_segments > 0) {
    std::cerr << "warning: " << r.dropped_segments << " segments snapped to a single vertex\n";
  }
  json out = {{"segments", r.segments},
              {"dropped_segments", r.dropped_segments},
              {"cut_edges", r.cut_edges},
              {"duplicated_edges", r.duplicated_edges},
              {"duplicated_vertices", r.duplicated_vertices},
              {"boundary_edges_before", r.boundary_edges_before},
              {"vertices", mt_mesh_vertex_count(cut.get())},
              {"faces", mt_mesh_face_count(cut.get())}};
  out.update(topology_json(cut.get(), a.out));
  std::cout << out.dump() << "\n";
}

void run_seam_flatten(const SeamArgs& a) {
  Mesh mesh = load_mesh(a.input);
  mt_mesh* f = nullptr;
  std::size_t charts = 0;
  check(mt_flatten(mesh.get(), a.threads, &f, &charts), a.input);
  Mesh flat(f);
  check(mt_mesh_save_obj(flat.get(), a.out.c_str()), a.out);
  std::cout << json{{"charts", charts},
                    {"vertices", mt_mesh_vertex_count(flat.get())},
                    {"faces", mt_mesh_face_count(flat.get())}}
                   .dump()
            << "\n";
}

void run_seam_distort(const SeamArgs& a) {
  mt_mesh* m = nullptr;
  check(mt_mesh_load_uv_obj(a.input.c_str(), &m), a.input);
  Mesh mesh(m);
  mt_distortion d{};
  double* energies = nullptr;
  check(mt_distortion_measure(mesh.get(), &d, a.per_face ? &energies : nullptr), a.input);
  json out = {{"mean", d.mean}, {"faces", d.faces}, {"degenerate_faces", d.degenerate_faces}};
  if (energies != nullptr) {
    out["energies"] = std::vector<double>(energies, energies + d.faces);
    mt_free(energies);
  }
  std::cout << out.dump() << "\n";
  std::cerr << "mean conformal energy " << d.mean << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meshtopo: mesh tokenization, topology metrics, M-DPO and seam tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mt_version());
  const unsigned default_threads = std::max(1u, std::thread::hardware_concurrency());

  TokenizeArgs tok;
  auto* tokenize = app.add_subcommand("tokenize", "Encode an OBJ mesh as a BPT token record");
  tokenize->add_option("mesh", tok.input, "Input OBJ")->required()->check(CLI::ExistingFile);
  tokenize->add_option("--out", tok.out, "Output JSON-lines file (default stdout)");
  tokenize->add_option("--id", tok.id, "Record id (default file stem)");
  tokenize->add_flag("--normalize", tok.normalize, "Fit into the [-1,1] cube first");
  tokenize->add_flag("--verify", tok.verify, "Decode and compare with the canonical mesh");
  tok.bpt.add(tokenize);

  DetokenizeArgs detok;
  auto* detokenize = app.add_subcommand("detokenize", "Decode a token record to OBJ");
  detokenize->add_option("tokens", detok.input, "Token JSON-lines")->required()
      ->check(CLI::ExistingFile);
  detokenize->add_option("--out", detok.out, "Output OBJ")->required();
  detokenize->add_option("--id", detok.id, "Record to decode (default first)");
  detok.bpt.add(detokenize);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "BER, TS and HD of a mesh against a cloud");
  evaluate->add_option("mesh", ev.mesh, "Input OBJ")->required()->check(CLI::ExistingFile);
  evaluate->add_option("cloud", ev.cloud, "Reference XYZ cloud")->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev.out, "Also write the report here");
  evaluate->add_option("--id", ev.id, "Report id (default mesh file stem)");
  evaluate->add_option("--cond", ev.cond, "Condition id stored in the report");
  evaluate->add_option("--samples", ev.samples, "Surface samples for HD")->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Sampling seed")->required();

  RankArgs rk;
  auto* rank = app.add_subcommand("rank", "Build preference triplets by strict dominance");
  rank->add_option("--reports", rk.reports, "Report JSON-lines file or directory")->required()
      ->check(CLI::ExistingPath);
  rank->add_option("--tokens", rk.tokens, "Token JSON-lines file or directory")->required()
      ->check(CLI::ExistingPath);
  rank->add_option("--out", rk.out, "Triplet JSON-lines (default stdout)");
  rank->add_option("--cond", rk.cond, "Condition for records without one")->capture_default_str();
  rk.mask.add(rank);
  rk.bpt.add(rank);

  MaskArgs mk;
  auto* mask = app.add_subcommand("mask", "Per-token quality masks of token records");
  mask->add_option("tokens", mk.tokens, "Token JSON-lines file or directory")->required()
      ->check(CLI::ExistingPath);
  mask->add_option("--out", mk.out, "Mask JSON-lines (default stdout)");
  mk.mask.add(mask);
  mk.bpt.add(mask);

  TrainArgs tr;
  mt_model_shape_default(&tr.shape);
  auto* train = app.add_subcommand("train", "Pre-train (NLL) or post-train (M-DPO) the toy model");
  train->add_option("--mode", tr.mode, "pretrain or mdpo")->required()
      ->check(CLI::IsMember({"pretrain", "mdpo"}));
  train->add_option("--data", tr.data, "Token records (pretrain) or triplets (mdpo)")->required()
      ->check(CLI::ExistingPath);
  train->add_option("--model-out", tr.model_out, "Checkpoint to write")->required();
  train->add_option("--model-in", tr.model_in, "Starting checkpoint")->check(CLI::ExistingFile);
  train->add_option("--reference", tr.reference, "Frozen reference checkpoint (mdpo)")
      ->check(CLI::ExistingFile);
  train->add_option("--log", tr.log, "Step log JSON-lines (default stdout)");
  train->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  train->add_option("--steps", tr.steps, "Gradient steps")->capture_default_str();
  train->add_option("--beta", tr.beta, "M-DPO beta")->capture_default_str();
  train->add_option("--seed", tr.seed, "Initialization and window seed")->required();
  train->add_option("--max-faces", tr.max_faces, "Train on random windows of this many faces");
  train->add_option("--cloud-dir", tr.cloud_dir, "Condition clouds <dir>/<cond>.xyz")
      ->check(CLI::ExistingDirectory);
  train->add_option("--vocab", tr.vocab, "Vocabulary size (default from the data)");
  train->add_option("--embed-dim", tr.shape.embed_dim)->capture_default_str();
  train->add_option("--context", tr.shape.context)->capture_default_str();
  train->add_option("--layers", tr.shape.layers)->capture_default_str();
  train->add_option("--cond-dim", tr.shape.cond_dim)->capture_default_str();
  train->add_option("--init-scale", tr.init_scale)->capture_default_str();
  tr.threads = default_threads;
  train->add_option("--threads", tr.threads, "Worker threads")->check(CLI::PositiveNumber);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample tokens with a sliding context window");
  generate->add_option("--model", gen.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  generate->add_option("--cloud", gen.cloud, "Condition cloud (default zero condition)")
      ->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out, "Output JSON-lines (default stdout)");
  generate->add_option("--id", gen.id)->capture_default_str();
  generate->add_option("--max-tokens", gen.max_tokens)->capture_default_str();
  generate->add_option("--window", gen.window, "Context window (default model context)");
  generate->add_option("--stop-token", gen.stop_token, "Stop after emitting this token");
  generate->add_option("--seed", gen.seed, "Sampling seed")->required();
  gen.bpt.add(generate);

  SeamArgs sm;
  sm.threads = default_threads;
  auto* seam = app.add_subcommand("seam", "Seam sequences, cutting, flattening and distortion");
  seam->require_subcommand(1);
  auto add_levels = [&](CLI::App* cmd) {
    cmd->add_option("--levels", sm.levels, "Quantization levels")->capture_default_str();
  };
  auto* s_encode = seam->add_subcommand("encode", "Seam text to a coordinate-token record");
  s_encode->add_option("seams", sm.input, "Seam file")->required()->check(CLI::ExistingFile);
  s_encode->add_option("--out", sm.out, "Output JSON-lines (default stdout)");
  s_encode->add_option("--id", sm.id, "Record id (default file stem)");
  add_levels(s_encode);
  auto* s_decode = seam->add_subcommand("decode", "Coordinate-token record to seam text");
  s_decode->add_option("tokens", sm.input, "Seam JSON-lines")->required()
      ->check(CLI::ExistingFile);
  s_decode->add_option("--out", sm.out, "Output text file")->required();
  add_levels(s_decode);
  auto* s_ratio = seam->add_subcommand("ratio", "Seam count over vertex count");
  s_ratio->add_option("seams", sm.input)->required()->check(CLI::ExistingFile);
  s_ratio->add_option("mesh", sm.mesh)->required()->check(CLI::ExistingFile);
  add_levels(s_ratio);
  auto* s_sample = seam->add_subcommand("sample", "Structural points on vertices and edges");
  s_sample->add_option("mesh", sm.input)->required()->check(CLI::ExistingFile);
  s_sample->add_option("--out", sm.out, "XYZ file: vertex points, then edge points");
  s_sample->add_option("--seed", sm.seed)->required();
  auto* s_cut = seam->add_subcommand("cut", "Cut a mesh along snapped seam paths");
  s_cut->add_option("mesh", sm.mesh)->required()->check(CLI::ExistingFile);
  s_cut->add_option("seams", sm.input)->required()->check(CLI::ExistingFile);
  s_cut->add_option("--out", sm.out, "Cut OBJ")->required();
  add_levels(s_cut);
  auto* s_flatten = seam->add_subcommand("flatten", "Flatten every chart into the plane");
  s_flatten->add_option("mesh", sm.input)->required()->check(CLI::ExistingFile);
  s_flatten->add_option("--out", sm.out, "OBJ with vt records")->required();
  s_flatten->add_option("--threads", sm.threads)->check(CLI::PositiveNumber);
  auto* s_distort = seam->add_subcommand("distort", "Mean conformal energy of a UV mesh");
  s_distort->add_option("mesh", sm.input, "OBJ with vt records")->required()
      ->check(CLI::ExistingFile);
  s_distort->add_flag("--per-face", sm.per_face, "Include per-face energies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*tokenize) run_tokenize(tok);
    if (*detokenize) run_detokenize(detok);
    if (*evaluate) run_evaluate(ev);
    if (*rank) run_rank(rk);
    if (*mask) run_mask(mk);
    if (*train) run_train(tr);
    if (*generate) run_generate(gen);
    if (*s_encode) run_seam_encode(sm);
    if (*s_decode) run_seam_decode(sm);
    if (*s_ratio) run_seam_ratio(sm);
    if (*s_sample) run_seam_sample(sm);
    if (*s_cut) run_seam_cut(sm);
    if (*s_flatten) run_seam_flatten(sm);
    if (*s_distort) run_seam_distort(sm);
  } catch (const Failure& e) {
    std::cerr << "meshtopo: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "meshtopo: " << e.what() << "\n";
    return kExitInput;
  }
  std::cout.flush();
  return std::cout ? 0 : kExitInput;
}
