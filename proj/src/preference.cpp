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

#include "meshtopo/preference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "meshtopo/error.hpp"

namespace meshtopo::preference {

void MaskConfig::validate() const {
  if (!(tau_quad >= 0.0 && tau_quad <= 1.0) || !(tau_topo >= 0.0 && tau_topo <= 1.0)) {
    fail(ErrorCode::kDomain, "mask thresholds must lie in [0, 1]");
  }
}

bool dominates(const metrics::QualityReport& a, const metrics::QualityReport& b) {
  return a.ber < b.ber && a.ts > b.ts && a.hd < b.hd;
}

double face_topology_score(std::span<const Vec3> c) {
  if (c.size() == 4) {
    constexpr double kTolerance = std::numbers::pi / 4.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec3 u = c[(k + 3) % 4] - c[k];
      const Vec3 v = c[(k + 1) % 4] - c[k];
      const double nu = norm(u);
      const double nv = norm(v);
      if (nu == 0.0 || nv == 0.0) return 0.5;
      const double angle = std::acos(std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0));
      if (std::abs(angle - std::numbers::pi / 2.0) > kTolerance) return 0.5;
    }
    return 1.0;
  }
  if (c.size() != 3) fail(ErrorCode::kUnsupportedFace, "face must have 3 or 4 corners");
  const double sq = distance_squared(c[0], c[1]) + distance_squared(c[1], c[2]) +
                    distance_squared(c[2], c[0]);
  if (sq == 0.0) return 0.0;
  const double quality = 4.0 * std::sqrt(3.0) * triangle_area(c[0], c[1], c[2]) / sq;
  return std::min(1.0, quality);
}

MaskVector mask_phi(const bpt::TokenSequence& tokens, const Mesh& mesh,
                    const MaskConfig& cfg, const bpt::Config& bpt_cfg) {
  cfg.validate();
  bpt::check_structure(tokens);
  const std::vector<bpt::DecodedFace> faces = bpt::decode_faces(tokens, bpt_cfg);
  if (!same_mesh(bpt::decode(tokens, bpt_cfg),
                 canonicalize(mesh, bpt_cfg.grid()))) {
    fail(ErrorCode::kConsistency, "token sequence does not encode the given mesh");
  }
  const std::size_t patches = tokens.patch_spans.size();
  std::vector<std::size_t> face_count(patches, 0);
  std::vector<std::size_t> quad_count(patches, 0);
  std::vector<double> score_sum(patches, 0.0);
  const QuantGrid grid = bpt_cfg.grid();
  for (const bpt::DecodedFace& f : faces) {
    if (f.patch >= patches) {
      fail(ErrorCode::kConsistency, "decoded patch count exceeds patch spans");
    }
    std::vector<Vec3> corners;
    for (const Bins& b : f.corners) corners.push_back(dequantize(b, grid));
    ++face_count[f.patch];
    if (corners.size() == 4) ++quad_count[f.patch];
    score_sum[f.patch] += face_topology_score(corners);
  }

  MaskVector mask(tokens.size(), 0);
  for (std::size_t p = 0; p < patches; ++p) {
    if (face_count[p] == 0) {
      fail(ErrorCode::kConsistency, "patch span " + std::to_string(p) + " holds no face");
    }
    const double n = static_cast<double>(face_count[p]);
    const bool good = static_cast<double>(quad_count[p]) / n >= cfg.tau_quad &&
                      score_sum[p] / n >= cfg.tau_topo;
    const auto [first, last] = tokens.patch_spans[p];
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(first),
              mask.begin() + static_cast<std::ptrdiff_t>(last), good ? 1 : 0);
  }
  return mask;
}

TripletResult build_triplets(const CandidateSet& set, const MaskConfig& cfg,
                             const bpt::Config& bpt_cfg) {
  cfg.validate();
  const auto& cands = set.candidates;
  if (cands.size() < 2) {
    fail(ErrorCode::kPrecondition, "condition '" + set.condition_id +
                                       "' needs at least 2 candidates");
  }
  std::set<std::string> ids;
  for (const Candidate& c : cands) {
    if (!ids.insert(c.mesh_id).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate candidate id '" + c.mesh_id + "'");
    }
  }

  std::map<std::size_t, MaskVector> masks;
  auto mask_of = [&](std::size_t i) -> const MaskVector& {
    auto it = masks.find(i);
    if (it == masks.end()) {
      const Mesh mesh = bpt::decode(cands[i].tokens, bpt_cfg);
      it = masks.emplace(i, mask_phi(cands[i].tokens, mesh, cfg, bpt_cfg)).first;
    }
    return it->second;
  };

  TripletResult result;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (i == j) continue;
      ++result.pairs_compared;
      if (!dominates(cands[i].report, cands[j].report)) continue;
      PreferenceTriplet t;
      t.condition_id = set.condition_id;
      t.winner = {cands[i].mesh_id, cands[i].tokens.tokens, mask_of(i)};
      t.loser = {cands[j].mesh_id, cands[j].tokens.tokens, mask_of(j)};
      result.triplets.push_back(std::move(t));
    }
  }
  std::sort(result.triplets.begin(), result.triplets.end(),
            [](const PreferenceTriplet& a, const PreferenceTriplet& b) {
              return std::tie(a.winner.mesh_id, a.loser.mesh_id) <
                     std::tie(b.winner.mesh_id, b.loser.mesh_id);
            });
  return result;
}

}  // namespace meshtopo::preference
