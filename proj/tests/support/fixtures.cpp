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

#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "meshtopo/random.hpp"

namespace meshtopo::testing {

Mesh triangle() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}};
  m.name = "triangle";
  return m;
}

Mesh two_triangles() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  m.name = "two_triangles";
  return m;
}

Mesh tetrahedron() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  m.name = "tetrahedron";
  return m;
}

namespace {

Mesh fan(int n, int rim, double sweep) {
  Mesh m;
  m.vertices.push_back({0, 0, 0});
  for (int i = 0; i < rim; ++i) {
    const double t = sweep * i / n;
    m.vertices.push_back({0.5 * std::cos(t), 0.5 * std::sin(t), 0});
  }
  for (int i = 0; i < n; ++i) m.faces.push_back({0, 1 + i, 1 + (i + 1) % rim});
  return m;
}

}  // namespace

Mesh closed_fan(int n) {
  Mesh m = fan(n, n, 2 * std::numbers::pi);
  m.name = "closed_fan";
  return m;
}

Mesh open_fan(int n) {
  Mesh m = fan(n, n + 1, 0.75 * std::numbers::pi);
  m.name = "open_fan";
  return m;
}

namespace {

Mesh grid(int nx, int ny, bool quads) {
  Mesh m;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({-1.0 + 2.0 * i / nx, -1.0 + 2.0 * j / ny, 0});
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (quads) {
        m.faces.push_back({a, b, c, d});
      } else {
        m.faces.push_back({a, b, c});
        m.faces.push_back({a, c, d});
      }
    }
  }
  return m;
}

}  // namespace

Mesh quad_grid(int nx, int ny) {
  Mesh m = grid(nx, ny, true);
  m.name = "quad_grid";
  return m;
}

Mesh tri_grid(int nx, int ny) {
  Mesh m = grid(nx, ny, false);
  m.name = "tri_grid";
  return m;
}

Mesh cylinder(int around, int rows) {
  Mesh m;
  for (int r = 0; r <= rows; ++r) {
    for (int c = 0; c < around; ++c) {
      const double t = 2 * std::numbers::pi * c / around;
      m.vertices.push_back({std::cos(t), -1.0 + 2.0 * r / rows, std::sin(t)});
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < around; ++c) {
      const int a = r * around + c, b = r * around + (c + 1) % around;
      const int d = a + around, e = b + around;
      m.faces.push_back({a, d, e});
      m.faces.push_back({a, e, b});
    }
  }
  m.name = "cylinder";
  return m;
}

Mesh random_canonical(std::uint64_t seed, int max_faces) {
  Rng rng(seed);
  // Jittered grid points so faces stay non-degenerate after quantization.
  const int nv = 4 + static_cast<int>(rng.below(30));
  Mesh m;
  for (int i = 0; i < nv; ++i)
    m.vertices.push_back({rng.uniform() * 2 - 1, rng.uniform() * 2 - 1,
                          rng.uniform() * 2 - 1});
  const int nf = 1 + static_cast<int>(rng.below(max_faces));
  for (int f = 0; f < nf; ++f) {
    const int arity = rng.uniform() < 0.3 ? 4 : 3;
    Face face;
    while (static_cast<int>(face.size()) < arity) {
      const int v = static_cast<int>(rng.below(nv));
      bool seen = false;
      for (int u : face) seen = seen || u == v;
      if (!seen) face.push_back(v);
    }
    m.faces.push_back(face);
  }
  return canonicalize(m);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace meshtopo::testing
