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
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "meshtopo/mesh.hpp"

namespace meshtopo::seam {

struct SeamSegment {
  Vec3 head;  // lower yzx key
  Vec3 tail;
  friend bool operator==(const SeamSegment&, const SeamSegment&) = default;
};

struct SeamSequence {
  std::vector<SeamSegment> segments;
  std::size_t size() const { return segments.size(); }
  friend bool operator==(const SeamSequence&, const SeamSequence&) = default;
};

// Puts the lower-yzx endpoint first in every segment, then sorts segments by
// (head key, tail key). Zero-length segments are a kDegenerate error.
SeamSequence order_seams(std::vector<SeamSegment> segments);

// Coordinate tokens x_h y_h z_h x_t y_t z_t per segment.
std::vector<int> encode_seam(const SeamSequence& seq, const QuantGrid& grid = {});
// Inverse of encode_seam; length must be a multiple of 6 (kFraming otherwise).
SeamSequence decode_seam(std::span<const int> tokens, const QuantGrid& grid = {});

// Plain text, one `x y z x y z` segment per line.
SeamSequence read_seams_text(std::istream& in, const std::string& source = "<stream>");
void write_seams_text(std::ostream& out, const SeamSequence& seq);

inline constexpr std::size_t kStructuralPointsPerKind = 30720;

struct StructuralSamples {
  std::vector<Vec3> vertex_points;
  std::vector<Vec3> edge_points;
};

// Points per edge: max(1, round(total * len / sum len)), corrected by largest
// remainder until the counts sum to `total`. With more edges than `total`,
// the `total` longest edges get one point each.
std::vector<std::size_t> allocate_edge_points(std::span<const double> lengths,
                                              std::size_t total);

// Vertex points repeat every vertex floor(total / V) times and spread the
// remainder over a seeded random subset; edge points sit at the centres of
// K equal sub-intervals of each edge. Without edges, edge points are drawn
// from the vertices as well.
StructuralSamples sample_structural(std::span<const Vec3> vertices,
                                    std::span<const Edge> edges, std::uint64_t seed,
                                    std::size_t per_kind = kStructuralPointsPerKind);
StructuralSamples sample_structural(const Mesh& mesh, std::uint64_t seed);

inline constexpr double kSeamRatioLow = 0.1;
inline constexpr double kSeamRatioHigh = 0.35;

struct SeamRatio {
  double ratio = 0.0;
  bool valid = false;
  int band = 0;  // -1 below, 0 inside, +1 above the valid range
};

SeamRatio seam_ratio(const SeamSequence& seq, const Mesh& mesh);

struct SnapResult {
  std::vector<std::pair<VertexId, VertexId>> endpoints;
  std::size_t dropped = 0;  // segments whose ends met at one vertex
};

// Nearest vertex per endpoint; the lowest index wins ties.
SnapResult snap_to_mesh(const SeamSequence& seq, const Mesh& mesh);

}  // namespace meshtopo::seam
