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

#include "meshtopo/mesh.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "meshtopo/error.hpp"
#include "meshtopo/random.hpp"

namespace meshtopo {

std::size_t Mesh::quad_count() const {
  return static_cast<std::size_t>(std::count_if(
      faces.begin(), faces.end(), [](const Face& f) { return f.size() == 4; }));
}

bool same_mesh(const Mesh& a, const Mesh& b) {
  return a.vertices == b.vertices && a.faces == b.faces;
}

void validate(const Mesh& mesh) {
  const auto n = static_cast<VertexId>(mesh.vertices.size());
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (f.size() != 3 && f.size() != 4) {
      fail(ErrorCode::kUnsupportedFace, "face " + std::to_string(fi) + " has " +
                                            std::to_string(f.size()) +
                                            " vertices (expected 3 or 4)");
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (f[k] < 0 || f[k] >= n) {
        fail(ErrorCode::kIndex, "face " + std::to_string(fi) +
                                    " references vertex " +
                                    std::to_string(f[k]) + " of " +
                                    std::to_string(n));
      }
      for (std::size_t j = 0; j < k; ++j) {
        if (f[j] == f[k]) {
          fail(ErrorCode::kIndex, "face " + std::to_string(fi) +
                                      " repeats vertex " + std::to_string(f[k]));
        }
      }
    }
  }
}

void QuantGrid::validate() const {
  if (levels < 2) fail(ErrorCode::kDomain, "quantization levels must be >= 2");
  if (!(lo < hi)) fail(ErrorCode::kDomain, "quantization range requires lo < hi");
}

int quantize(double c, const QuantGrid& grid) {
  const double clamped = std::clamp(c, grid.lo, grid.hi);
  const double t = (clamped - grid.lo) / (grid.hi - grid.lo) * (grid.levels - 1);
  const int bin = static_cast<int>(std::floor(t + 0.5));
  return std::clamp(bin, 0, grid.levels - 1);
}

double dequantize(int bin, const QuantGrid& grid) {
  if (bin < 0 || bin >= grid.levels) {
    fail(ErrorCode::kDomain, "bin " + std::to_string(bin) + " outside [0, " +
                                 std::to_string(grid.levels - 1) + "]");
  }
  return grid.lo + static_cast<double>(bin) / (grid.levels - 1) * (grid.hi - grid.lo);
}

Bins quantize(const Vec3& p, const QuantGrid& grid) {
  return {quantize(p.x, grid), quantize(p.y, grid), quantize(p.z, grid)};
}

Vec3 dequantize(const Bins& bins, const QuantGrid& grid) {
  return {dequantize(bins[0], grid), dequantize(bins[1], grid),
          dequantize(bins[2], grid)};
}

void sort_yzx(std::vector<Vec3>& points) {
  std::stable_sort(points.begin(), points.end(), yzx_less);
}

Mesh normalize_unit_cube(const Mesh& mesh) {
  if (mesh.vertices.empty()) {
    fail(ErrorCode::kDegenerate, "cannot normalize a mesh without vertices");
  }
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const Vec3& v : mesh.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  const Vec3 extent = hi - lo;
  const double longest = std::max({extent.x, extent.y, extent.z});
  if (!(longest > 0.0)) {
    fail(ErrorCode::kDegenerate, "mesh has zero bounding-box extent");
  }
  const Vec3 center = 0.5 * (lo + hi);
  const double scale = 2.0 / longest;
  Mesh out = mesh;
  for (Vec3& v : out.vertices) {
    v = (v - center) * scale;
    // Pin the longest axis to exactly [-1, 1] despite rounding.
    v = {std::clamp(v.x, -1.0, 1.0), std::clamp(v.y, -1.0, 1.0),
         std::clamp(v.z, -1.0, 1.0)};
  }
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& src = mesh.vertices[i];
    Vec3& dst = out.vertices[i];
    if (extent.x == longest) {
      if (src.x == lo.x) dst.x = -1.0;
      if (src.x == hi.x) dst.x = 1.0;
    }
    if (extent.y == longest) {
      if (src.y == lo.y) dst.y = -1.0;
      if (src.y == hi.y) dst.y = 1.0;
    }
    if (extent.z == longest) {
      if (src.z == lo.z) dst.z = -1.0;
      if (src.z == hi.z) dst.z = 1.0;
    }
  }
  return out;
}

namespace {

Face rotate_to_lowest(const Face& f) {
  Face out = f;
  std::rotate(out.begin(), std::min_element(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Mesh canonicalize(const Mesh& mesh, const QuantGrid& grid,
                  CanonicalizeReport* report) {
  grid.validate();
  validate(mesh);
  CanonicalizeReport local;
  CanonicalizeReport& rep = report ? *report : local;
  rep = {};

  const std::size_t n = mesh.vertices.size();
  std::vector<Bins> bins(n);
  for (std::size_t i = 0; i < n; ++i) bins[i] = quantize(mesh.vertices[i], grid);

  // Vertices a face references; every vertex when there are no faces.
  std::vector<char> used(n, mesh.faces.empty() ? 1 : 0);
  for (const Face& f : mesh.faces) {
    for (VertexId v : f) used[v] = 1;
  }

  auto yzx = [](const Bins& b) { return std::array<int, 3>{b[1], b[2], b[0]}; };
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) order.push_back(i);
  }
  rep.unreferenced_vertices = n - order.size();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return yzx(bins[a]) < yzx(bins[b]);
  });

  Mesh out;
  out.name = mesh.name;
  std::vector<VertexId> remap(n, -1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t src = order[k];
    if (!out.vertices.empty() && k > 0 && bins[order[k - 1]] == bins[src]) {
      remap[src] = static_cast<VertexId>(out.vertices.size() - 1);
      ++rep.merged_vertices;
      continue;
    }
    remap[src] = static_cast<VertexId>(out.vertices.size());
    out.vertices.push_back(dequantize(bins[src], grid));
  }

  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    Face f;
    for (VertexId v : mesh.faces[fi]) {
      const VertexId r = remap[v];
      if (std::find(f.begin(), f.end(), r) == f.end()) f.push_back(r);
    }
    if (f.size() < 3) {
      ++rep.dropped_faces;
      rep.warnings.push_back("face " + std::to_string(fi) +
                             " collapsed after quantization and was dropped");
      continue;
    }
    out.faces.push_back(rotate_to_lowest(f));
  }
  std::sort(out.faces.begin(), out.faces.end());

  if (rep.dropped_faces > 0) {
    // Dropping faces can orphan vertices; run once more to compact them.
    Mesh again = canonicalize(out, grid, nullptr);
    again.name = out.name;
    rep.unreferenced_vertices += out.vertices.size() - again.vertices.size();
    return again;
  }
  return out;
}

bool is_canonical(const Mesh& mesh, const QuantGrid& grid) {
  try {
    return same_mesh(canonicalize(mesh, grid), mesh);
  } catch (const Error&) {
    return false;
  }
}

int EdgeTopology::find(VertexId u, VertexId v) const {
  const Edge e = make_edge(u, v);
  const auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) return -1;
  return static_cast<int>(it - edges.begin());
}

std::size_t EdgeTopology::boundary_edge_count() const {
  return static_cast<std::size_t>(
      std::count(incidence.begin(), incidence.end(), 1));
}

EdgeTopology build_edge_topology(const Mesh& mesh) {
  std::vector<Edge> all;
  for (const Face& f : mesh.faces) {
    for (std::size_t k = 0; k < f.size(); ++k) {
      all.push_back(make_edge(f[k], f[(k + 1) % f.size()]));
    }
  }
  std::sort(all.begin(), all.end());

  EdgeTopology topo;
  topo.vertex_degree.assign(mesh.vertices.size(), 0);
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    topo.edges.push_back(all[i]);
    topo.incidence.push_back(static_cast<int>(j - i));
    ++topo.vertex_degree[all[i].a];
    ++topo.vertex_degree[all[i].b];
    i = j;
  }
  return topo;
}

Mesh triangulate(const Mesh& mesh) {
  Mesh out;
  out.name = mesh.name;
  out.vertices = mesh.vertices;
  out.faces.reserve(mesh.faces.size() + mesh.quad_count());
  for (const Face& f : mesh.faces) {
    if (f.size() == 4) {
      out.faces.push_back({f[0], f[1], f[2]});
      out.faces.push_back({f[0], f[2], f[3]});
    } else {
      out.faces.push_back(f);
    }
  }
  return out;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

double face_area(const Mesh& mesh, const Face& face) {
  const auto& p = mesh.vertices;
  double area = triangle_area(p[face[0]], p[face[1]], p[face[2]]);
  if (face.size() == 4) area += triangle_area(p[face[0]], p[face[2]], p[face[3]]);
  return area;
}

double surface_area(const Mesh& mesh) {
  double total = 0.0;
  for (const Face& f : mesh.faces) total += face_area(mesh, f);
  return total;
}

PointCloud sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.faces.empty()) {
    fail(ErrorCode::kPrecondition, "surface sampling needs at least one face");
  }
  if (n == 0) fail(ErrorCode::kPrecondition, "sample count must be >= 1");
  const Mesh tri = triangulate(mesh);
  std::vector<double> cumulative(tri.faces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < tri.faces.size(); ++i) {
    total += face_area(tri, tri.faces[i]);
    cumulative[i] = total;
  }
  if (!(total > 0.0)) {
    fail(ErrorCode::kDegenerate, "mesh has zero total surface area");
  }

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    // upper_bound never lands on a zero-area face.
    const Face& f = tri.faces[static_cast<std::size_t>(it - cumulative.begin())];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3& a = tri.vertices[f[0]];
    const Vec3& b = tri.vertices[f[1]];
    const Vec3& c = tri.vertices[f[2]];
    cloud.points.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
  }
  return cloud;
}

}  // namespace meshtopo
