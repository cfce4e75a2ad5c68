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

#include "meshtopo/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "meshtopo/error.hpp"
#include "meshtopo/random.hpp"

namespace meshtopo::pipeline {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> record_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".json" || ext == ".jsonl")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::ifstream open(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

template <typename Fn>
auto with_step(std::size_t step, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumeric) throw;
    rethrow_with_context(e, "step " + std::to_string(step));
  }
}

}  // namespace

Tokenized tokenize(const Mesh& mesh, const bpt::Config& cfg) {
  cfg.validate();
  Tokenized out;
  out.canonical = canonicalize(mesh, cfg.grid(), &out.canon);
  out.seq = bpt::encode(out.canonical, cfg);
  return out;
}

RankResult rank(std::span<const io::ReportRecord> reports,
                std::span<const io::TokenRecord> tokens, const std::string& default_cond,
                const preference::MaskConfig& mask_cfg, const bpt::Config& cfg) {
  std::map<std::string, const io::TokenRecord*> by_id;
  for (const auto& rec : tokens) {
    if (!by_id.emplace(rec.id, &rec).second) {
      fail(ErrorCode::kConsistency, "duplicate token record id \"" + rec.id + "\"");
    }
  }
  std::vector<preference::CandidateSet> sets;
  std::map<std::string, std::size_t> set_of;
  for (const auto& rec : reports) {
    const auto it = by_id.find(rec.report.mesh_id);
    if (it == by_id.end()) {
      fail(ErrorCode::kConsistency, "no token record for report \"" + rec.report.mesh_id + "\"");
    }
    std::string cond = !rec.cond.empty() ? rec.cond : it->second->cond;
    if (cond.empty()) cond = default_cond;
    auto [pos, inserted] = set_of.try_emplace(cond, sets.size());
    if (inserted) sets.push_back({cond, {}});
    sets[pos->second].candidates.push_back({rec.report.mesh_id, it->second->seq, rec.report});
  }
  RankResult out;
  out.conditions = sets.size();
  for (const auto& set : sets) {
    try {
      auto result = preference::build_triplets(set, mask_cfg, cfg);
      out.pairs_compared += result.pairs_compared;
      for (auto& t : result.triplets) out.triplets.push_back(std::move(t));
    } catch (const Error& e) {
      rethrow_with_context(e, "condition \"" + set.condition_id + "\"");
    }
  }
  return out;
}

std::vector<io::ReportRecord> load_reports(const fs::path& path) {
  std::vector<io::ReportRecord> out;
  const auto files = fs::is_directory(path) ? record_files(path) : std::vector{path};
  for (const auto& file : files) {
    auto in = open(file);
    for (auto& rec : io::read_reports(in, file.string())) out.push_back(std::move(rec));
  }
  return out;
}

std::vector<io::TokenRecord> load_token_records(const fs::path& path) {
  std::vector<io::TokenRecord> out;
  const auto files = fs::is_directory(path) ? record_files(path) : std::vector{path};
  for (const auto& file : files) {
    auto in = open(file);
    for (auto& rec : io::read_token_records(in, file.string())) out.push_back(std::move(rec));
  }
  return out;
}

std::vector<preference::PreferenceTriplet> load_triplets(const fs::path& path) {
  auto in = open(path);
  return io::read_triplets(in, path.string());
}

ConditionResolver cloud_conditions(const fs::path& dir, int dim) {
  return [dir, dim](const std::string& cond) {
    if (dir.empty() || cond.empty()) return mdpo::zero_condition(dim);
    return mdpo::condition_from_cloud(load_xyz(dir / (cond + ".xyz")), dim);
  };
}

void pretrain(mdpo::TrainState& state, std::span<const io::TokenRecord> corpus,
              const TrainOptions& opts, const ConditionResolver& conditions,
              const StepCallback& on_step) {
  if (!(opts.lr > 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  if (corpus.empty()) fail(ErrorCode::kPrecondition, "empty training corpus");
  const int vocab = state.model.shape().vocab_size;
  std::vector<mdpo::SequenceExample> full;
  for (const auto& rec : corpus) {
    if (rec.seq.vocab_size != vocab) {
      fail(ErrorCode::kConsistency, "record \"" + rec.id + "\" has vocab " +
                                        std::to_string(rec.seq.vocab_size) + ", model has " +
                                        std::to_string(vocab));
    }
    if (rec.seq.tokens.empty()) fail(ErrorCode::kPrecondition, "record \"" + rec.id + "\" is empty");
    full.push_back({rec.seq.tokens, conditions(rec.cond)});
  }
  Rng rng(opts.seed);
  // Truncated training draws one face window per sequence and step.
  auto batch = [&] {
    if (opts.max_faces == 0) return full;
    std::vector<mdpo::SequenceExample> out = full;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& seq = corpus[i].seq;
      if (seq.face_count() <= opts.max_faces) continue;
      const auto start = rng.below(seq.face_count());
      out[i].tokens = bpt::truncate_window(seq, opts.max_faces, start).tokens;
    }
    return out;
  };
  for (std::size_t step = 0; step < opts.steps; ++step) {
    const auto examples = batch();
    const auto result = with_step(step, [&] {
      return mdpo::train_step(state, std::span<const mdpo::SequenceExample>(examples), opts.lr,
                              opts.threads);
    });
    if (on_step) on_step(step, result);
  }
  const auto examples = batch();
  const auto final_result = with_step(opts.steps, [&] {
    return mdpo::evaluate_batch(state.model, std::span<const mdpo::SequenceExample>(examples));
  });
  if (on_step) on_step(opts.steps, final_result);
}

void mdpo_train(mdpo::TrainState& state, const mdpo::ToyARModel& reference,
                std::span<const preference::PreferenceTriplet> triplets,
                const TrainOptions& opts, const ConditionResolver& conditions,
                const StepCallback& on_step) {
  if (!(opts.lr > 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  opts.mdpo.validate();
  if (triplets.empty()) fail(ErrorCode::kPrecondition, "no preference triplets");
  if (!(reference.shape() == state.model.shape())) {
    fail(ErrorCode::kConsistency, "policy and reference shapes differ");
  }
  std::vector<mdpo::TripletExample> examples;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    try {
      examples.emplace_back(triplets[i], reference, opts.mdpo,
                            conditions(triplets[i].condition_id));
    } catch (const Error& e) {
      rethrow_with_context(e, "triplet " + std::to_string(i));
    }
  }
  for (std::size_t step = 0; step < opts.steps; ++step) {
    const auto result = with_step(step, [&] {
      return mdpo::train_step(state, std::span<const mdpo::TripletExample>(examples), opts.lr,
                              opts.threads);
    });
    if (on_step) on_step(step, result);
  }
  const auto final_result = with_step(opts.steps, [&] {
    return mdpo::evaluate_batch(state.model, std::span<const mdpo::TripletExample>(examples));
  });
  if (on_step) on_step(opts.steps, final_result);
}

CutSummary cut(const Mesh& mesh, const seam::SeamSequence& seams) {
  CutSummary out;
  out.segments = seams.size();
  out.unwrap = uv::cut_along_seams(mesh, seams);
  for (const auto& chart : uv::extract_charts(out.unwrap.cut.mesh)) {
    ++out.charts;
    if (chart.is_disk) ++out.disk_charts;
  }
  return out;
}

Flattened flatten(const Mesh& mesh, unsigned threads) {
  const auto charts = uv::extract_charts(mesh);
  for (std::size_t i = 0; i < charts.size(); ++i) {
    if (!charts[i].is_disk) {
      fail(ErrorCode::kTopology, "chart " + std::to_string(i) + " is not a disk (euler " +
                                     std::to_string(charts[i].euler) + ", " +
                                     std::to_string(charts[i].loop_count) + " boundary loops)");
    }
  }
  const auto flat = uv::flatten_charts(charts, threads);
  return {uv::merge_charts(flat, mesh.name), flat.size()};
}

uv::Distortion distortion(const UvMesh& mesh) {
  if (mesh.uvs.size() != mesh.mesh.vertices.size()) {
    fail(ErrorCode::kPrecondition, "mesh has no per-vertex uvs");
  }
  return uv::face_distortion(triangulate(mesh.mesh), mesh.uvs);
}

seam::SeamSequence load_seams(const fs::path& path, const QuantGrid& grid) {
  const std::string text = io::read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  std::istringstream in(text);
  if (first != std::string::npos && text[first] == '{') {
    const auto records = io::read_seam_records(in, path.string());
    try {
      return seam::decode_seam(records.front().tokens, grid);
    } catch (const Error& e) {
      rethrow_with_context(e, path.string() + " record \"" + records.front().id + "\"");
    }
  }
  return seam::read_seams_text(in, path.string());
}

}  // namespace meshtopo::pipeline
