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

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace meshtopo {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double distance_squared(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return dot(d, d);
}

using VertexId = int;
// 3 or 4 distinct vertex indices, counter-clockwise.
using Face = std::vector<VertexId>;

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string name;

  std::size_t quad_count() const;
};

// Same geometry and connectivity; the name is ignored.
bool same_mesh(const Mesh& a, const Mesh& b);

// Throws kIndex or kUnsupportedFace when the mesh invariants do not hold.
void validate(const Mesh& mesh);

struct PointCloud {
  std::vector<Vec3> points;
};

struct QuantGrid {
  int levels = 1024;
  double lo = -1.0;
  double hi = 1.0;

  void validate() const;
};

using Bins = std::array<int, 3>;

// Clamps into [lo, hi] and rounds half up.
int quantize(double c, const QuantGrid& grid);
double dequantize(int bin, const QuantGrid& grid);
Bins quantize(const Vec3& p, const QuantGrid& grid);
Vec3 dequantize(const Bins& bins, const QuantGrid& grid);

// Lexicographic (y, z, x); y is the vertical axis.
struct YzxKey {
  double y;
  double z;
  double x;
  auto operator<=>(const YzxKey&) const = default;
};

inline YzxKey sort_key_yzx(const Vec3& v) { return {v.y, v.z, v.x}; }
inline bool yzx_less(const Vec3& a, const Vec3& b) {
  return sort_key_yzx(a) < sort_key_yzx(b);
}
// Stable, so equal points keep their input order.
void sort_yzx(std::vector<Vec3>& points);

// Uniform scale plus translation so the longest bounding-box axis spans
// exactly [-1, 1] and the box is centred at the origin.
Mesh normalize_unit_cube(const Mesh& mesh);

struct CanonicalizeReport {
  std::size_t merged_vertices = 0;
  std::size_t dropped_faces = 0;
  std::size_t unreferenced_vertices = 0;
  std::vector<std::string> warnings;
};

// Quantizes, sorts vertices by yzx, merges duplicates, rotates every face to
// start at its lowest index and sorts faces. Faces that collapse below three
// distinct vertices are dropped and recorded in `report`. When the mesh has
// faces, vertices no face references are removed.
Mesh canonicalize(const Mesh& mesh, const QuantGrid& grid = {},
                  CanonicalizeReport* report = nullptr);
bool is_canonical(const Mesh& mesh, const QuantGrid& grid = {});

struct Edge {
  VertexId a;  // a < b
  VertexId b;
  auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(VertexId u, VertexId v) {
  return u < v ? Edge{u, v} : Edge{v, u};
}

struct EdgeTopology {
  std::vector<Edge> edges;         // sorted
  std::vector<int> incidence;      // faces per edge
  std::vector<int> vertex_degree;  // incident edges per vertex

  // Index into `edges`, or -1.
  int find(VertexId u, VertexId v) const;
  std::size_t boundary_edge_count() const;
};

EdgeTopology build_edge_topology(const Mesh& mesh);

// Splits quads along the 0-2 diagonal.
Mesh triangulate(const Mesh& mesh);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double face_area(const Mesh& mesh, const Face& face);
double surface_area(const Mesh& mesh);

// Area-weighted face choice followed by uniform barycentric placement.
PointCloud sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed);

}  // namespace meshtopo
