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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "meshtopo/mesh.hpp"

namespace meshtopo {

// Wavefront OBJ restricted to `v` and `f` records. `vt`, `vn`, `o`, `g`, `s`
// and material statements are skipped; any other keyword is a parse error.
// Face corners may use the `v/vt/vn` form, only the position index is kept.
Mesh read_obj(std::istream& in, const std::string& source = "<stream>");
Mesh load_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const Mesh& mesh);
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

// One `x y z` triple per line; blank lines and `#` comments are skipped.
PointCloud read_xyz(std::istream& in, const std::string& source = "<stream>");
PointCloud load_xyz(const std::filesystem::path& path);
void write_xyz(std::ostream& out, const PointCloud& cloud);
void save_xyz(const PointCloud& cloud, const std::filesystem::path& path);

using Uv = std::array<double, 2>;

// A triangle mesh with one UV per vertex, as written by the chart exporter.
struct UvMesh {
  Mesh mesh;
  std::vector<Uv> uvs;
};

// Reads `v`, `vt` and `f a/t ...` records. Every distinct (position, uv)
// corner pair becomes one vertex of the result.
UvMesh read_uv_obj(std::istream& in, const std::string& source = "<stream>");
UvMesh load_uv_obj(const std::filesystem::path& path);
void write_uv_obj(std::ostream& out, const UvMesh& mesh);
void save_uv_obj(const UvMesh& mesh, const std::filesystem::path& path);

}  // namespace meshtopo
