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

#include "meshtopo/metrics.hpp"

#include <algorithm>

#include "meshtopo/error.hpp"
#include "meshtopo/kdtree.hpp"
#include "meshtopo/parallel.hpp"

namespace meshtopo::metrics {

double boundary_edge_ratio(const Mesh& mesh) {
  const EdgeTopology topo = build_edge_topology(mesh);
  if (topo.edges.empty()) fail(ErrorCode::kDomain, "mesh has no edges");
  return static_cast<double>(topo.boundary_edge_count()) /
         static_cast<double>(topo.edges.size());
}

double topology_score(const Mesh& mesh) {
  if (mesh.faces.empty()) fail(ErrorCode::kPrecondition, "mesh has no faces");
  const EdgeTopology topo = build_edge_topology(mesh);
  const std::size_t nv = mesh.vertices.size();

  std::vector<char> on_boundary(nv, 0);
  std::vector<char> touches_face(nv, 0);
  std::vector<char> touches_quad(nv, 0);
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    if (topo.incidence[e] == 1) {
      on_boundary[topo.edges[e].a] = 1;
      on_boundary[topo.edges[e].b] = 1;
    }
  }
  for (const Face& f : mesh.faces) {
    for (VertexId v : f) {
      touches_face[v] = 1;
      if (f.size() == 4) touches_quad[v] = 1;
    }
  }

  std::size_t interior = 0;
  std::size_t regular = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!touches_face[v] || on_boundary[v]) continue;
    ++interior;
    const int target = touches_quad[v] ? 4 : 6;
    if (topo.vertex_degree[v] == target) ++regular;
  }
  const double quad_ratio = static_cast<double>(mesh.quad_count()) /
                            static_cast<double>(mesh.faces.size());
  const double regularity =
      interior == 0 ? 1.0 : static_cast<double>(regular) / static_cast<double>(interior);
  return 0.5 * quad_ratio + 0.5 * regularity;
}

namespace {

double directed(std::span<const Vec3> from, const KdTree& to) {
  double worst = 0.0;
  for (const Vec3& p : from) worst = std::max(worst, to.nearest(p).distance_squared);
  return worst;
}

}  // namespace

double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) {
    fail(ErrorCode::kPrecondition, "Hausdorff distance of an empty point set");
  }
  const KdTree ta(a);
  const KdTree tb(b);
  return std::sqrt(std::max(directed(a, tb), directed(b, ta)));
}

double hausdorff_distance(const Mesh& mesh, const PointCloud& cloud,
                          std::size_t samples, std::uint64_t seed) {
  if (cloud.points.empty()) fail(ErrorCode::kPrecondition, "reference cloud is empty");
  const PointCloud surface = sample_surface(mesh, samples, seed);
  return hausdorff(surface.points, cloud.points);
}

QualityReport evaluate(const Mesh& mesh, const PointCloud& cloud,
                       std::size_t samples, std::uint64_t seed) {
  QualityReport report;
  report.mesh_id = mesh.name;
  try {
    validate(mesh);
  } catch (const Error& e) {
    rethrow_with_context(e, "mesh");
  }
  try {
    report.ber = boundary_edge_ratio(mesh);
    const EdgeTopology topo = build_edge_topology(mesh);
    report.nonmanifold_edges = static_cast<std::size_t>(std::count_if(
        topo.incidence.begin(), topo.incidence.end(), [](int c) { return c >= 3; }));
  } catch (const Error& e) {
    rethrow_with_context(e, "ber");
  }
  try {
    report.ts = topology_score(mesh);
  } catch (const Error& e) {
    rethrow_with_context(e, "ts");
  }
  try {
    report.hd = hausdorff_distance(mesh, cloud, samples, seed);
  } catch (const Error& e) {
    rethrow_with_context(e, "hd");
  }
  return report;
}

std::vector<QualityReport> evaluate_batch(std::span<const Mesh> meshes,
                                          const PointCloud& cloud,
                                          std::size_t samples, std::uint64_t seed,
                                          unsigned threads) {
  std::vector<QualityReport> out(meshes.size());
  parallel_for(meshes.size(), threads, [&](std::size_t i) {
    out[i] = evaluate(meshes[i], cloud, samples, seed);
  });
  return out;
}

}  // namespace meshtopo::metrics
