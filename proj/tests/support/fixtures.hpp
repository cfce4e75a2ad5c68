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

#include <cstdint>
#include <filesystem>
#include <string>

#include "meshtopo/mesh.hpp"

namespace meshtopo::testing {

Mesh triangle();
Mesh two_triangles();  // unit square, shared diagonal 0-2
Mesh tetrahedron();
// Hub at the origin and a rim of `n` or `n + 1` points on a circle.
Mesh closed_fan(int n);
Mesh open_fan(int n);
// nx by ny cells over [-1,1]^2 in the z = 0 plane.
Mesh quad_grid(int nx, int ny);
Mesh tri_grid(int nx, int ny);
// Open tube around the y axis, `around` columns and `rows` rows; vertex
// (row r, column c) is r * around + c. Column 0 is the generator at x = 1.
Mesh cylinder(int around, int rows);
// Random tri/quad mesh, already canonical.
Mesh random_canonical(std::uint64_t seed, int max_faces = 40);

// Fresh directory under the build tree, removed up front.
std::filesystem::path scratch_dir(const std::string& name);
std::string slurp(const std::filesystem::path& path);

}  // namespace meshtopo::testing
