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

#include "meshtopo/seam.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "meshtopo/error.hpp"
#include "meshtopo/kdtree.hpp"
#include "meshtopo/random.hpp"

namespace meshtopo::seam {

SeamSequence order_seams(std::vector<SeamSegment> segments) {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    SeamSegment& s = segments[i];
    if (s.head == s.tail) {
      fail(ErrorCode::kDegenerate, "seam segment " + std::to_string(i) + " has zero length");
    }
    if (yzx_less(s.tail, s.head)) std::swap(s.head, s.tail);
  }
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SeamSegment& a, const SeamSegment& b) {
                     const auto ka = sort_key_yzx(a.head);
                     const auto kb = sort_key_yzx(b.head);
                     if (ka != kb) return ka < kb;
                     return sort_key_yzx(a.tail) < sort_key_yzx(b.tail);
                   });
  return {std::move(segments)};
}

std::vector<int> encode_seam(const SeamSequence& seq, const QuantGrid& grid) {
  grid.validate();
  std::vector<int> tokens;
  tokens.reserve(6 * seq.size());
  for (const SeamSegment& s : seq.segments) {
    for (const Vec3& p : {s.head, s.tail}) {
      const Bins b = quantize(p, grid);
      tokens.insert(tokens.end(), b.begin(), b.end());
    }
  }
  return tokens;
}

SeamSequence decode_seam(std::span<const int> tokens, const QuantGrid& grid) {
  grid.validate();
  if (tokens.size() % 6 != 0) {
    fail(ErrorCode::kFraming, "seam token count " + std::to_string(tokens.size()) +
                                  " is not a multiple of 6");
  }
  std::vector<SeamSegment> segments;
  segments.reserve(tokens.size() / 6);
  for (std::size_t i = 0; i < tokens.size(); i += 6) {
    segments.push_back(
        {dequantize(Bins{tokens[i], tokens[i + 1], tokens[i + 2]}, grid),
         dequantize(Bins{tokens[i + 3], tokens[i + 4], tokens[i + 5]}, grid)});
  }
  return order_seams(std::move(segments));
}

SeamSequence read_seams_text(std::istream& in, const std::string& source) {
  std::vector<SeamSegment> segments;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    std::array<double, 6> v{};
    std::size_t count = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p == end) break;
      if (count == 6) {
        fail(ErrorCode::kParse, source + ":" + std::to_string(line_no) +
                                    ": expected 6 coordinates");
      }
      const auto [next, ec] = std::from_chars(p, end, v[count]);
      if (ec != std::errc() ||
          (next < end && *next != ' ' && *next != '\t' && *next != '\r')) {
        fail(ErrorCode::kParse, source + ":" + std::to_string(line_no) + ": invalid number");
      }
      ++count;
      p = next;
    }
    if (count == 0) continue;
    if (count != 6) {
      fail(ErrorCode::kParse, source + ":" + std::to_string(line_no) +
                                  ": expected 6 coordinates");
    }
    segments.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}});
  }
  return order_seams(std::move(segments));
}

void write_seams_text(std::ostream& out, const SeamSequence& seq) {
  char buf[160];
  for (const SeamSegment& s : seq.segments) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g\n", s.head.x,
                  s.head.y, s.head.z, s.tail.x, s.tail.y, s.tail.z);
    out << buf;
  }
}

std::vector<std::size_t> allocate_edge_points(std::span<const double> lengths,
                                              std::size_t total) {
  const std::size_t n = lengths.size();
  std::vector<std::size_t> counts(n, 0);
  if (n == 0 || total == 0) return counts;
  if (n > total) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lengths[a] > lengths[b]; });
    for (std::size_t i = 0; i < total; ++i) counts[order[i]] = 1;
    return counts;
  }
  const double sum = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  std::vector<double> quota(n);
  for (std::size_t i = 0; i < n; ++i) {
    quota[i] = sum > 0.0 ? static_cast<double>(total) * lengths[i] / sum
                         : static_cast<double>(total) / static_cast<double>(n);
    counts[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(quota[i])));
  }
  auto assigned = [&] { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t have = assigned(); have != total; have = assigned()) {
    auto remainder = [&](std::size_t i) { return quota[i] - static_cast<double>(counts[i]); };
    if (have < total) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder(a) > remainder(b);
      });
      for (std::size_t k = 0; k < n && have < total; ++k, ++have) ++counts[order[k]];
    } else {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder(a) < remainder(b);
      });
      for (std::size_t k = 0; k < n && have > total; ++k) {
        if (counts[order[k]] > 1) {
          --counts[order[k]];
          --have;
        }
      }
    }
  }
  return counts;
}

namespace {

std::vector<Vec3> oversample_vertices(std::span<const Vec3> vertices, std::size_t total,
                                      Rng& rng) {
  const std::size_t n = vertices.size();
  std::vector<std::size_t> counts(n, total / n);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  const std::size_t extra = total >= n ? total % n : total;
  if (total < n) std::fill(counts.begin(), counts.end(), 0);
  // Partial Fisher-Yates picks `extra` distinct vertices.
  for (std::size_t i = 0; i < extra; ++i) {
    std::swap(pool[i], pool[i + rng.below(n - i)]);
    ++counts[pool[i]];
  }
  std::vector<Vec3> out;
  out.reserve(total);
  for (std::size_t v = 0; v < n; ++v) out.insert(out.end(), counts[v], vertices[v]);
  return out;
}

}  // namespace

StructuralSamples sample_structural(std::span<const Vec3> vertices,
                                    std::span<const Edge> edges, std::uint64_t seed,
                                    std::size_t per_kind) {
  if (vertices.empty()) fail(ErrorCode::kPrecondition, "structural sampling needs vertices");
  Rng rng(seed);
  StructuralSamples out;
  out.vertex_points = oversample_vertices(vertices, per_kind, rng);
  if (edges.empty()) {
    out.edge_points = oversample_vertices(vertices, per_kind, rng);
    return out;
  }
  std::vector<double> lengths;
  lengths.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(std::max(e.a, e.b)) >= vertices.size()) {
      fail(ErrorCode::kIndex, "edge references a missing vertex");
    }
    lengths.push_back(distance(vertices[e.a], vertices[e.b]));
  }
  const auto counts = allocate_edge_points(lengths, per_kind);
  out.edge_points.reserve(per_kind);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Vec3& a = vertices[edges[i].a];
    const Vec3& b = vertices[edges[i].b];
    for (std::size_t k = 0; k < counts[i]; ++k) {
      const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(counts[i]);
      out.edge_points.push_back(a + t * (b - a));
    }
  }
  return out;
}

StructuralSamples sample_structural(const Mesh& mesh, std::uint64_t seed) {
  validate(mesh);
  const EdgeTopology topo = build_edge_topology(mesh);
  return sample_structural(mesh.vertices, topo.edges, seed);
}

SeamRatio seam_ratio(const SeamSequence& seq, const Mesh& mesh) {
  if (mesh.vertices.empty()) fail(ErrorCode::kPrecondition, "mesh has no vertices");
  SeamRatio r;
  r.ratio = static_cast<double>(seq.size()) / static_cast<double>(mesh.vertices.size());
  r.band = r.ratio < kSeamRatioLow ? -1 : (r.ratio > kSeamRatioHigh ? 1 : 0);
  r.valid = r.band == 0;
  return r;
}

SnapResult snap_to_mesh(const SeamSequence& seq, const Mesh& mesh) {
  if (mesh.vertices.empty()) fail(ErrorCode::kPrecondition, "mesh has no vertices");
  const KdTree tree(mesh.vertices);
  SnapResult out;
  for (const SeamSegment& s : seq.segments) {
    const auto a = static_cast<VertexId>(tree.nearest(s.head).index);
    const auto b = static_cast<VertexId>(tree.nearest(s.tail).index);
    if (a == b) {
      ++out.dropped;
      continue;
    }
    out.endpoints.emplace_back(a, b);
  }
  return out;
}

}  // namespace meshtopo::seam
