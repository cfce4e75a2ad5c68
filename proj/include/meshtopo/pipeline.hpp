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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "meshtopo/bpt.hpp"
#include "meshtopo/mesh_io.hpp"
#include "meshtopo/model.hpp"
#include "meshtopo/preference.hpp"
#include "meshtopo/serialize.hpp"
#include "meshtopo/training.hpp"
#include "meshtopo/uv.hpp"

// Multi-record stages shared by the C API and the command line tool.
namespace meshtopo::pipeline {

struct Tokenized {
  Mesh canonical;
  CanonicalizeReport canon;
  bpt::TokenSequence seq;
};

Tokenized tokenize(const Mesh& mesh, const bpt::Config& cfg = {});

// Reports are grouped by condition (their own `cond`, else the token
// record's, else `default_cond`) in order of first appearance.
struct RankResult {
  std::vector<preference::PreferenceTriplet> triplets;
  std::size_t pairs_compared = 0;
  std::size_t conditions = 0;
};

RankResult rank(std::span<const io::ReportRecord> reports,
                std::span<const io::TokenRecord> tokens, const std::string& default_cond,
                const preference::MaskConfig& mask_cfg = {}, const bpt::Config& cfg = {});

// A JSON-lines file or a directory whose *.json / *.jsonl files are read in
// name order.
std::vector<io::ReportRecord> load_reports(const std::filesystem::path& path);
std::vector<io::TokenRecord> load_token_records(const std::filesystem::path& path);
std::vector<preference::PreferenceTriplet> load_triplets(const std::filesystem::path& path);

using ConditionResolver = std::function<mdpo::ConditionEmbedding(const std::string& cond)>;

// Condition vectors from `<dir>/<cond>.xyz`; without a directory or cond
// every example gets the zero condition.
ConditionResolver cloud_conditions(const std::filesystem::path& dir, int dim);

struct TrainOptions {
  double lr = 0.05;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  std::size_t max_faces = 0;  // 0 trains on whole sequences
  unsigned threads = 1;
  mdpo::MDPOConfig mdpo;
};

using StepCallback = std::function<void(std::size_t step, const mdpo::StepResult&)>;

// Runs `steps` updates and reports steps + 1 records: the loss before each
// update and the loss after the last one. Numeric failures name the step.
void pretrain(mdpo::TrainState& state, std::span<const io::TokenRecord> corpus,
              const TrainOptions& opts, const ConditionResolver& conditions,
              const StepCallback& on_step);

void mdpo_train(mdpo::TrainState& state, const mdpo::ToyARModel& reference,
                std::span<const preference::PreferenceTriplet> triplets,
                const TrainOptions& opts, const ConditionResolver& conditions,
                const StepCallback& on_step);

struct CutSummary {
  uv::UnwrapResult unwrap;
  std::size_t segments = 0;
  std::size_t charts = 0;
  std::size_t disk_charts = 0;
};

CutSummary cut(const Mesh& mesh, const seam::SeamSequence& seams);

struct Flattened {
  UvMesh mesh;
  std::size_t charts = 0;
};

Flattened flatten(const Mesh& mesh, unsigned threads = 1);

uv::Distortion distortion(const UvMesh& mesh);

// Seams from plain text or from the first JSON-lines record.
seam::SeamSequence load_seams(const std::filesystem::path& path, const QuantGrid& grid = {});

}  // namespace meshtopo::pipeline
