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

#include "meshtopo/uv.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>

#include "meshtopo/error.hpp"
#include "meshtopo/parallel.hpp"

namespace meshtopo::uv {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // The smaller root survives, so roots are stable minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_vertex(const Mesh& mesh, VertexId v) {
  if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size()) {
    fail(ErrorCode::kIndex, "vertex " + std::to_string(v) + " not in mesh");
  }
}

}  // namespace

EdgeGraph::EdgeGraph(const Mesh& mesh) : adjacency_(mesh.vertices.size()) {
  const EdgeTopology topo = build_edge_topology(mesh);
  for (const Edge& e : topo.edges) {
    const double w = distance(mesh.vertices[e.a], mesh.vertices[e.b]);
    adjacency_[e.a].push_back({e.b, w});
    adjacency_[e.b].push_back({e.a, w});
  }
}

EdgePath EdgeGraph::shortest_path(VertexId from, VertexId to) const {
  const auto n = adjacency_.size();
  if (from < 0 || to < 0 || static_cast<std::size_t>(std::max(from, to)) >= n) {
    fail(ErrorCode::kIndex, "path endpoint not in mesh");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<VertexId> pred(n, -1);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[from] = 0.0;
  queue.push({0.0, from});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == to) break;
    for (const Arc& arc : adjacency_[u]) {
      if (done[arc.to]) continue;
      const double nd = d + arc.weight;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        pred[arc.to] = u;
        queue.push({nd, arc.to});
      } else if (nd == dist[arc.to] && u < pred[arc.to]) {
        pred[arc.to] = u;
      }
    }
  }
  if (dist[to] == kInf) {
    fail(ErrorCode::kNoPath, "no edge path between vertices " + std::to_string(from) +
                                 " and " + std::to_string(to));
  }
  EdgePath path;
  for (VertexId v = to; v != -1; v = pred[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

double EdgeGraph::path_length(const EdgePath& path) const {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto& arcs = adjacency_.at(static_cast<std::size_t>(path[i - 1]));
    const auto it = std::find_if(arcs.begin(), arcs.end(),
                                 [&](const Arc& a) { return a.to == path[i]; });
    if (it == arcs.end()) fail(ErrorCode::kInvalidPath, "path step is not a mesh edge");
    total += it->weight;
  }
  return total;
}

EdgePath geodesic_connect(VertexId from, VertexId to, const Mesh& mesh) {
  return EdgeGraph(mesh).shortest_path(from, to);
}

CutResult cut_mesh(const Mesh& mesh, std::span<const EdgePath> paths) {
  validate(mesh);
  const EdgeTopology topo = build_edge_topology(mesh);
  std::vector<char> cut(topo.edges.size(), 0);
  for (const EdgePath& path : paths) {
    for (VertexId v : path) check_vertex(mesh, v);
    for (std::size_t i = 1; i < path.size(); ++i) {
      const int e = topo.find(path[i - 1], path[i]);
      if (e < 0) {
        fail(ErrorCode::kInvalidPath, "edge (" + std::to_string(path[i - 1]) + ", " +
                                          std::to_string(path[i]) + ") is not in the mesh");
      }
      // Boundary edges are already open.
      if (topo.incidence[e] >= 2) cut[e] = 1;
    }
  }

  // Corner c of face f has id corner_base[f] + c.
  std::vector<std::size_t> corner_base(mesh.faces.size() + 1, 0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    corner_base[f + 1] = corner_base[f] + mesh.faces[f].size();
  }
  UnionFind groups(corner_base.back());

  // Per edge: (face, corner of a, corner of b) for every incident face.
  struct Side {
    std::size_t corner_a;
    std::size_t corner_b;
  };
  std::vector<std::vector<Side>> sides(topo.edges.size());
  std::vector<char> touched(mesh.vertices.size(), 0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (std::size_t k = 0; k < face.size(); ++k) {
      const std::size_t k2 = (k + 1) % face.size();
      const auto e = static_cast<std::size_t>(topo.find(face[k], face[k2]));
      const bool forward = face[k] == topo.edges[e].a;
      sides[e].push_back({corner_base[f] + (forward ? k : k2),
                          corner_base[f] + (forward ? k2 : k)});
      if (cut[e]) {
        touched[face[k]] = 1;
        touched[face[k2]] = 1;
      }
    }
  }
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    if (cut[e]) continue;
    for (std::size_t s = 1; s < sides[e].size(); ++s) {
      groups.unite(sides[e][0].corner_a, sides[e][s].corner_a);
      groups.unite(sides[e][0].corner_b, sides[e][s].corner_b);
    }
  }
  // Only vertices on a cut may split.
  std::vector<std::size_t> first_corner(mesh.vertices.size(), SIZE_MAX);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (std::size_t k = 0; k < mesh.faces[f].size(); ++k) {
      const VertexId v = mesh.faces[f][k];
      const std::size_t c = corner_base[f] + k;
      if (first_corner[v] == SIZE_MAX) {
        first_corner[v] = c;
      } else if (!touched[v]) {
        groups.unite(first_corner[v], c);
      }
    }
  }

  CutResult out;
  out.mesh.name = mesh.name;
  out.mesh.vertices = mesh.vertices;
  out.source_vertex.resize(mesh.vertices.size());
  std::iota(out.source_vertex.begin(), out.source_vertex.end(), VertexId{0});
  out.mesh.faces = mesh.faces;
  std::map<std::size_t, VertexId> root_vertex;
  std::vector<char> claimed(mesh.vertices.size(), 0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (std::size_t k = 0; k < mesh.faces[f].size(); ++k) {
      const VertexId v = mesh.faces[f][k];
      const std::size_t root = groups.find(corner_base[f] + k);
      auto it = root_vertex.find(root);
      if (it == root_vertex.end()) {
        VertexId id = v;
        if (claimed[v]) {
          id = static_cast<VertexId>(out.mesh.vertices.size());
          out.mesh.vertices.push_back(mesh.vertices[v]);
          out.source_vertex.push_back(v);
          ++out.report.duplicated_vertices;
        }
        claimed[v] = 1;
        it = root_vertex.emplace(root, id).first;
      }
      out.mesh.faces[f][k] = it->second;
    }
  }

  const EdgeTopology after = build_edge_topology(out.mesh);
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    if (!cut[e]) continue;
    ++out.report.cut_edges;
    // Split when the incident faces no longer all share one vertex pair.
    const auto& s = sides[e];
    auto pair_of = [&](const Side& side) {
      return std::pair(groups.find(side.corner_a), groups.find(side.corner_b));
    };
    if (std::any_of(s.begin() + 1, s.end(),
                    [&](const Side& side) { return pair_of(side) != pair_of(s[0]); })) {
      ++out.report.duplicated_edges;
    }
  }
  out.report.boundary_edges_before = topo.boundary_edge_count();
  out.report.boundary_edges_after = after.boundary_edge_count();
  return out;
}

int euler_characteristic(const Mesh& mesh) {
  std::vector<char> used(mesh.vertices.size(), 0);
  for (const Face& f : mesh.faces) {
    for (VertexId v : f) used[v] = 1;
  }
  const auto v = std::count(used.begin(), used.end(), 1);
  const auto e = build_edge_topology(mesh).edges.size();
  return static_cast<int>(v) - static_cast<int>(e) + static_cast<int>(mesh.faces.size());
}

std::vector<std::vector<VertexId>> boundary_loops(const Mesh& mesh) {
  const EdgeTopology topo = build_edge_topology(mesh);
  std::multimap<VertexId, VertexId> outgoing;
  for (const Face& f : mesh.faces) {
    for (std::size_t k = 0; k < f.size(); ++k) {
      const VertexId a = f[k];
      const VertexId b = f[(k + 1) % f.size()];
      if (topo.incidence[static_cast<std::size_t>(topo.find(a, b))] == 1) {
        outgoing.emplace(a, b);
      }
    }
  }
  std::vector<std::vector<VertexId>> loops;
  while (!outgoing.empty()) {
    std::vector<VertexId> loop;
    auto it = outgoing.begin();
    const VertexId start = it->first;
    VertexId cur = start;
    for (;;) {
      it = outgoing.find(cur);
      if (it == outgoing.end()) break;  // open chain on non-manifold input
      loop.push_back(cur);
      cur = it->second;
      outgoing.erase(it);
      if (cur == start) break;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<Chart> extract_charts(const Mesh& mesh) {
  validate(mesh);
  const std::size_t nf = mesh.faces.size();
  UnionFind faces(nf);
  std::map<Edge, std::size_t> owner;
  for (std::size_t f = 0; f < nf; ++f) {
    const Face& face = mesh.faces[f];
    for (std::size_t k = 0; k < face.size(); ++k) {
      const auto [it, inserted] = owner.try_emplace(make_edge(face[k], face[(k + 1) % face.size()]), f);
      if (!inserted) faces.unite(it->second, f);
    }
  }
  std::map<std::size_t, std::size_t> chart_of_root;
  std::vector<Chart> charts;
  for (std::size_t f = 0; f < nf; ++f) {
    const std::size_t root = faces.find(f);
    auto [it, inserted] = chart_of_root.try_emplace(root, charts.size());
    if (inserted) charts.emplace_back();
    charts[it->second].parent_face.push_back(f);
  }
  for (Chart& chart : charts) {
    std::vector<VertexId> used;
    for (std::size_t f : chart.parent_face) {
      used.insert(used.end(), mesh.faces[f].begin(), mesh.faces[f].end());
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    chart.parent_vertex = used;
    chart.mesh.name = mesh.name;
    for (VertexId v : used) chart.mesh.vertices.push_back(mesh.vertices[v]);
    for (std::size_t f : chart.parent_face) {
      Face local;
      for (VertexId v : mesh.faces[f]) {
        local.push_back(static_cast<VertexId>(
            std::lower_bound(used.begin(), used.end(), v) - used.begin()));
      }
      chart.mesh.faces.push_back(std::move(local));
    }
    chart.euler = euler_characteristic(chart.mesh);
    const auto loops = boundary_loops(chart.mesh);
    chart.loop_count = loops.size();
    chart.is_disk = chart.euler == 1 && loops.size() == 1;
    if (!loops.empty()) chart.boundary_loop = loops.front();
  }
  return charts;
}

namespace {

// Orthonormal frame of the best-fit plane when every vertex lies on it.
struct PlaneFrame {
  Vec3 origin;
  Vec3 u;
  Vec3 v;
};

std::optional<PlaneFrame> planar_frame(const Mesh& mesh) {
  Vec3 normal;
  for (const Face& f : mesh.faces) {
    normal += cross(mesh.vertices[f[1]] - mesh.vertices[f[0]],
                    mesh.vertices[f[2]] - mesh.vertices[f[0]]);
  }
  const double len = norm(normal);
  if (!(len > 0.0)) return std::nullopt;
  normal *= 1.0 / len;
  Vec3 origin;
  for (const Vec3& p : mesh.vertices) origin += p;
  origin *= 1.0 / static_cast<double>(mesh.vertices.size());
  double extent = 0.0;
  for (const Vec3& p : mesh.vertices) extent = std::max(extent, distance(p, origin));
  for (const Vec3& p : mesh.vertices) {
    if (std::abs(dot(p - origin, normal)) > 1e-9 * std::max(extent, 1e-300)) {
      return std::nullopt;
    }
  }
  // Any vector not parallel to the normal seeds the in-plane axis.
  const Vec3 seed = std::abs(normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 u = cross(seed, normal);
  u *= 1.0 / norm(u);
  return PlaneFrame{origin, u, cross(normal, u)};
}

double corner_angle(const Vec3& at, const Vec3& a, const Vec3& b) {
  const Vec3 x = a - at;
  const Vec3 y = b - at;
  return std::atan2(norm(cross(x, y)), dot(x, y));
}

double signed_uv_area(const Uv& a, const Uv& b, const Uv& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

}  // namespace

Chart flatten_chart(const Chart& input) {
  Chart chart = input;
  chart.mesh = triangulate(input.mesh);
  chart.uvs.clear();
  // parent_face now refers to the source faces of the split triangles.
  std::vector<std::size_t> parents;
  for (std::size_t f = 0; f < input.mesh.faces.size(); ++f) {
    const std::size_t p = f < input.parent_face.size() ? input.parent_face[f] : f;
    parents.push_back(p);
    if (input.mesh.faces[f].size() == 4) parents.push_back(p);
  }
  chart.parent_face = std::move(parents);
  const Mesh& mesh = chart.mesh;

  chart.euler = euler_characteristic(mesh);
  const auto loops = boundary_loops(mesh);
  chart.loop_count = loops.size();
  chart.is_disk = chart.euler == 1 && loops.size() == 1;
  if (!chart.is_disk) {
    fail(ErrorCode::kTopology, "chart is not a disk (euler characteristic " +
                                   std::to_string(chart.euler) + ", " +
                                   std::to_string(loops.size()) + " boundary loops)");
  }
  chart.boundary_loop = loops.front();
  const auto& loop = chart.boundary_loop;
  const std::size_t n = mesh.vertices.size();

  std::vector<Uv> uvs(n, Uv{0.0, 0.0});
  std::vector<char> fixed(n, 0);
  if (const auto frame = planar_frame(mesh)) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 d = mesh.vertices[i] - frame->origin;
      uvs[i] = {dot(d, frame->u), dot(d, frame->v)};
    }
    for (VertexId v : loop) fixed[v] = 1;
  } else {
    double perimeter = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
      perimeter += distance(mesh.vertices[loop[k]], mesh.vertices[loop[(k + 1) % loop.size()]]);
    }
    double walked = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
      const double theta = 2.0 * std::numbers::pi * walked / perimeter;
      uvs[loop[k]] = {std::cos(theta), std::sin(theta)};
      fixed[loop[k]] = 1;
      walked += distance(mesh.vertices[loop[k]], mesh.vertices[loop[(k + 1) % loop.size()]]);
    }
  }

  std::vector<int> unknown(n, -1);
  int count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fixed[i]) unknown[i] = count++;
  }
  if (count > 0) {
    // Mean-value weights: w_ij = (tan(a1/2) + tan(a2/2)) / |x_i - x_j| with
    // a1, a2 the angles at i in the triangles beside edge ij.
    std::map<std::pair<VertexId, VertexId>, double> weight;
    for (const Face& f : mesh.faces) {
      for (int k = 0; k < 3; ++k) {
        const VertexId i = f[k];
        const VertexId j = f[(k + 1) % 3];
        const VertexId l = f[(k + 2) % 3];
        const Vec3& pi = mesh.vertices[i];
        const double half = std::tan(0.5 * corner_angle(pi, mesh.vertices[j], mesh.vertices[l]));
        weight[{i, j}] += half / distance(pi, mesh.vertices[j]);
        weight[{i, l}] += half / distance(pi, mesh.vertices[l]);
      }
    }
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(count, 2);
    std::vector<double> diagonal(static_cast<std::size_t>(count), 0.0);
    for (const auto& [key, w] : weight) {
      const auto [i, j] = key;
      const int row = unknown[i];
      if (row < 0) continue;
      if (!std::isfinite(w)) fail(ErrorCode::kNumeric, "non-finite mean-value weight");
      diagonal[static_cast<std::size_t>(row)] += w;
      if (unknown[j] >= 0) {
        entries.emplace_back(row, unknown[j], -w);
      } else {
        rhs(row, 0) += w * uvs[j][0];
        rhs(row, 1) += w * uvs[j][1];
      }
    }
    for (int r = 0; r < count; ++r) entries.emplace_back(r, r, diagonal[static_cast<std::size_t>(r)]);
    Eigen::SparseMatrix<double> system(count, count);
    system.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(system);
    if (solver.info() != Eigen::Success) {
      fail(ErrorCode::kNumeric, "singular flattening system");
    }
    const Eigen::MatrixXd solution = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !solution.allFinite()) {
      fail(ErrorCode::kNumeric, "flattening solve failed");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (unknown[i] >= 0) uvs[i] = {solution(unknown[i], 0), solution(unknown[i], 1)};
    }
  }

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    if (!(std::abs(signed_uv_area(uvs[t[0]], uvs[t[1]], uvs[t[2]])) > 0.0)) {
      fail(ErrorCode::kNumeric, "flattening produced a degenerate triangle at face " +
                                    std::to_string(f));
    }
  }
  chart.uvs = std::move(uvs);
  return chart;
}

std::vector<Chart> flatten_charts(std::span<const Chart> charts, unsigned threads) {
  std::vector<Chart> out(charts.size());
  parallel_for(charts.size(), threads,
               [&](std::size_t i) { out[i] = flatten_chart(charts[i]); });
  return out;
}

double conformal_energy(double sigma1, double sigma2) {
  return sigma1 / sigma2 + sigma2 / sigma1 - 2.0;
}

Distortion face_distortion(const Mesh& mesh, std::span<const Uv> uvs) {
  if (uvs.size() != mesh.vertices.size()) {
    fail(ErrorCode::kConsistency, "expected one uv per vertex");
  }
  Distortion out;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    if (t.size() != 3) fail(ErrorCode::kUnsupportedFace, "distortion needs triangles");
    const Vec3 e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
    const Vec3 e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
    const double l1 = norm(e1);
    const Vec3 n = cross(e1, e2);
    double energy = kInf;
    if (l1 > 0.0 && norm(n) > 0.0) {
      const Vec3 ax = e1 * (1.0 / l1);
      const Vec3 ay = cross(n * (1.0 / norm(n)), ax);
      // Local 2D edge coordinates X and UV edge coordinates U; J = U X^-1.
      const Eigen::Matrix2d x{{l1, dot(e2, ax)}, {0.0, dot(e2, ay)}};
      const Uv& u0 = uvs[t[0]];
      const Eigen::Matrix2d u{{uvs[t[1]][0] - u0[0], uvs[t[2]][0] - u0[0]},
                              {uvs[t[1]][1] - u0[1], uvs[t[2]][1] - u0[1]}};
      const Eigen::Matrix2d j = u * x.inverse();
      // Closed-form singular values of a 2x2 matrix.
      const double a = j(0, 0), b = j(0, 1), c = j(1, 0), d = j(1, 1);
      const double p = std::hypot(a + d, c - b);
      const double q = std::hypot(a - d, b + c);
      const double s1 = 0.5 * (p + q);
      const double s2 = 0.5 * std::abs(p - q);
      if (s2 > 1e-300 && std::isfinite(s1)) energy = conformal_energy(s1, s2);
    }
    if (!std::isfinite(energy)) out.degenerate_faces.push_back(f);
    out.energies.push_back(energy);
    sum += energy;
  }
  out.mean = mesh.faces.empty() ? 0.0 : sum / static_cast<double>(mesh.faces.size());
  return out;
}

Distortion face_distortion(const Chart& chart) {
  if (chart.uvs.empty()) fail(ErrorCode::kPrecondition, "chart has no uvs");
  return face_distortion(chart.mesh, chart.uvs);
}

UvMesh merge_charts(std::span<const Chart> charts, const std::string& name) {
  UvMesh out;
  out.mesh.name = name;
  for (const Chart& chart : charts) {
    if (chart.uvs.size() != chart.mesh.vertices.size()) {
      fail(ErrorCode::kPrecondition, "chart is not flattened");
    }
    const auto base = static_cast<VertexId>(out.mesh.vertices.size());
    out.mesh.vertices.insert(out.mesh.vertices.end(), chart.mesh.vertices.begin(),
                             chart.mesh.vertices.end());
    out.uvs.insert(out.uvs.end(), chart.uvs.begin(), chart.uvs.end());
    for (Face f : chart.mesh.faces) {
      for (VertexId& v : f) v += base;
      out.mesh.faces.push_back(std::move(f));
    }
  }
  return out;
}

UnwrapResult cut_along_seams(const Mesh& mesh, const seam::SeamSequence& seams) {
  validate(mesh);
  UnwrapResult out;
  out.snap = seam::snap_to_mesh(seams, mesh);
  const EdgeGraph graph(mesh);
  for (const auto& [a, b] : out.snap.endpoints) out.paths.push_back(graph.shortest_path(a, b));
  out.cut = cut_mesh(mesh, out.paths);
  return out;
}

}  // namespace meshtopo::uv
