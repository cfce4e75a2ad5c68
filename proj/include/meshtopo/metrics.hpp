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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "meshtopo/mesh.hpp"

namespace meshtopo::metrics {

struct QualityReport {
  std::string mesh_id;
  double ber = 0.0;
  double ts = 0.0;
  double hd = 0.0;
  // Edges shared by three or more faces; not counted as boundary.
  std::size_t nonmanifold_edges = 0;
};

inline constexpr std::size_t kDefaultSamples = 10000;
inline constexpr std::uint64_t kDefaultSeed = 0;

// Fraction of edges with exactly one incident face.
double boundary_edge_ratio(const Mesh& mesh);

// 0.5 * quad ratio + 0.5 * valence regularity. Regularity is the fraction
// of interior vertices (on no boundary edge) whose edge degree is 4 when
// they touch a quad and 6 otherwise; 1 when there are no interior vertices.
double topology_score(const Mesh& mesh);

// Symmetric Hausdorff distance between two point sets.
double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b);

// Hausdorff distance between `samples` surface samples of `mesh` and `cloud`.
double hausdorff_distance(const Mesh& mesh, const PointCloud& cloud,
                          std::size_t samples = kDefaultSamples,
                          std::uint64_t seed = kDefaultSeed);

// Errors from a metric are rethrown prefixed with "ber", "ts" or "hd".
QualityReport evaluate(const Mesh& mesh, const PointCloud& cloud,
                       std::size_t samples = kDefaultSamples,
                       std::uint64_t seed = kDefaultSeed);

// Evaluates meshes against one cloud on up to `threads` workers; results
// follow input order.
std::vector<QualityReport> evaluate_batch(std::span<const Mesh> meshes,
                                          const PointCloud& cloud,
                                          std::size_t samples, std::uint64_t seed,
                                          unsigned threads);

}  // namespace meshtopo::metrics
