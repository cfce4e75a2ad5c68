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
#include <span>
#include <vector>

#include "meshtopo/mesh.hpp"
#include "meshtopo/mesh_io.hpp"
#include "meshtopo/seam.hpp"

namespace meshtopo::uv {

using EdgePath = std::vector<VertexId>;  // consecutive vertices share an edge

// Dijkstra over the mesh edge graph with Euclidean edge weights.
class EdgeGraph {
 public:
  explicit EdgeGraph(const Mesh& mesh);

  // Among equal-cost paths the lower predecessor index wins. Throws kNoPath
  // when the two vertices are not connected.
  EdgePath shortest_path(VertexId from, VertexId to) const;
  double path_length(const EdgePath& path) const;

 private:
  struct Arc {
    VertexId to;
    double weight;
  };
  std::vector<std::vector<Arc>> adjacency_;
};

EdgePath geodesic_connect(VertexId from, VertexId to, const Mesh& mesh);

struct CutReport {
  std::size_t cut_edges = 0;          // interior edges on some path
  std::size_t duplicated_edges = 0;   // cut edges now split into two
  std::size_t duplicated_vertices = 0;
  std::size_t boundary_edges_before = 0;
  std::size_t boundary_edges_after = 0;
};

struct CutResult {
  Mesh mesh;
  CutReport report;
  std::vector<VertexId> source_vertex;  // per output vertex
};

// Splits the mesh along the given edge paths. Around every vertex touched
// by a cut edge, face corners connected through uncut edges share one copy of
// the vertex; each additional group gets a new vertex. Face count and order
// are preserved.
CutResult cut_mesh(const Mesh& mesh, std::span<const EdgePath> paths);

int euler_characteristic(const Mesh& mesh);

// Closed boundary loops following face orientation.
std::vector<std::vector<VertexId>> boundary_loops(const Mesh& mesh);

struct Chart {
  Mesh mesh;
  std::vector<VertexId> parent_vertex;   // chart vertex -> input vertex
  std::vector<std::size_t> parent_face;  // chart face -> input face
  int euler = 0;
  std::size_t loop_count = 0;
  bool is_disk = false;  // euler == 1 with exactly one boundary loop
  std::vector<VertexId> boundary_loop;  // first loop, chart indices
  std::vector<Uv> uvs;  // empty until flattened
};

// Connected components over shared edges, ordered by lowest face index.
std::vector<Chart> extract_charts(const Mesh& mesh);

// Triangulates (0-2 split) and embeds the chart in the plane with mean-value
// weights. A planar chart keeps its own boundary positions, so it is
// reproduced up to a rigid motion; otherwise the boundary loop goes onto the
// unit circle by arc length. Throws kTopology for non-disk charts and
// kNumeric when the solve fails or yields a degenerate triangle.
Chart flatten_chart(const Chart& chart);

std::vector<Chart> flatten_charts(std::span<const Chart> charts, unsigned threads);

// sigma1/sigma2 + sigma2/sigma1 - 2 for singular values of the 3D-to-UV map.
double conformal_energy(double sigma1, double sigma2);

struct Distortion {
  std::vector<double> energies;  // per triangle; +inf when degenerate
  double mean = 0.0;
  std::vector<std::size_t> degenerate_faces;
};

Distortion face_distortion(const Mesh& triangles, std::span<const Uv> uvs);
Distortion face_distortion(const Chart& chart);

// All charts in one mesh with one UV per vertex.
UvMesh merge_charts(std::span<const Chart> charts, const std::string& name = {});

struct UnwrapResult {
  seam::SnapResult snap;
  std::vector<EdgePath> paths;
  CutResult cut;
};

// Snap seam endpoints to vertices, connect them by edge geodesics and cut.
UnwrapResult cut_along_seams(const Mesh& mesh, const seam::SeamSequence& seams);

}  // namespace meshtopo::uv
