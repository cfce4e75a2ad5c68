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
#include <string>
#include <vector>

#include "meshtopo/bpt.hpp"
#include "meshtopo/mesh.hpp"
#include "meshtopo/metrics.hpp"

namespace meshtopo::preference {

using MaskVector = std::vector<std::uint8_t>;

struct MaskConfig {
  double tau_quad = 0.8;
  double tau_topo = 0.5;

  void validate() const;
};

struct Candidate {
  std::string mesh_id;
  bpt::TokenSequence tokens;
  metrics::QualityReport report;
};

struct CandidateSet {
  std::string condition_id;
  std::vector<Candidate> candidates;
};

struct Sample {
  std::string mesh_id;
  std::vector<std::int32_t> tokens;
  MaskVector mask;
};

struct PreferenceTriplet {
  std::string condition_id;
  Sample winner;
  Sample loser;
};

// Strict on all three metrics: lower BER, higher TS, lower HD.
bool dominates(const metrics::QualityReport& a, const metrics::QualityReport& b);

// 1 for a quad whose corner angles all lie within 45 degrees of 90, 0.5 for
// any other quad, and min(1, 4*sqrt(3)*area / sum of squared edge lengths)
// for a triangle.
double face_topology_score(std::span<const Vec3> corners);

// Per patch span: 1 when the patch quad ratio is at least tau_quad and its
// mean face score is at least tau_topo. `mesh` must be what `tokens` decode to.
MaskVector mask_phi(const bpt::TokenSequence& tokens, const Mesh& mesh,
                    const MaskConfig& cfg = {}, const bpt::Config& bpt_cfg = {});

struct TripletResult {
  std::vector<PreferenceTriplet> triplets;
  std::size_t pairs_compared = 0;  // ordered pairs
};

// One triplet per ordered dominating pair, sorted by (winner id, loser id).
TripletResult build_triplets(const CandidateSet& set, const MaskConfig& cfg = {},
                             const bpt::Config& bpt_cfg = {});

}  // namespace meshtopo::preference
