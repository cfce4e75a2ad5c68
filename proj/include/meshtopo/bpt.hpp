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
#include <utility>
#include <vector>

#include "meshtopo/mesh.hpp"

namespace meshtopo::bpt {

// Per-axis coordinate bins are split into a coarse block and a fine offset.
struct Config {
  int levels = 1024;
  int blocks_per_axis = 16;
  int offsets_per_axis = 64;

  void validate() const;
  QuantGrid grid() const { return QuantGrid{levels, -1.0, 1.0}; }

  // Vocabulary layout:
  //   0                               patch start
  //   1 .. blocks^3                   block ids
  //   blocks^3+1 .. blocks^3+offs^3   offset ids
  //   then fan break, quad marker, closed patch start, closed fan break.
  // The four controls sit at the top of the vocabulary, so they can be
  // recovered from vocab_size alone.
  std::int32_t block_count() const;
  std::int32_t offset_count() const;
  std::int32_t block_token(std::int32_t block) const { return 1 + block; }
  std::int32_t offset_token(std::int32_t offset) const {
    return 1 + block_count() + offset;
  }
  std::int32_t fan_break_token() const { return 1 + block_count() + offset_count(); }
  std::int32_t quad_token() const { return fan_break_token() + 1; }
  std::int32_t closed_patch_token() const { return fan_break_token() + 2; }
  std::int32_t closed_break_token() const { return fan_break_token() + 3; }
  std::int32_t vocab_size() const { return fan_break_token() + 4; }
};

inline constexpr std::int32_t kPatchStart = 0;

using Span = std::pair<std::size_t, std::size_t>;  // [first, second)

struct TokenSequence {
  std::vector<std::int32_t> tokens;
  std::vector<Span> patch_spans;
  std::vector<Span> face_spans;  // decode order
  std::int32_t vocab_size = 0;

  std::size_t size() const { return tokens.size(); }
  std::size_t face_count() const { return face_spans.size(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Throws kConsistency when the spans do not partition the token list or a
// token lies outside the vocabulary. The closing triangle of a closed run owns
// no tokens, so its face span is empty.
void check_structure(const TokenSequence& seq);

struct BlockOffset {
  std::int32_t block;
  std::int32_t offset;
  friend bool operator==(const BlockOffset&, const BlockOffset&) = default;
};

// Row-major packing with x most significant: id = (x * n + y) * n + z.
BlockOffset block_index(const Bins& bins, const Config& cfg);
Bins block_unindex(std::int32_t block, std::int32_t offset, const Config& cfg);

// A center vertex plus the faces it gathers. Runs are fan chains: a run
// p0 p1 p2 ... yields faces (c, p0, p1), (c, p1, p2), ...; a step flagged as
// quad consumes two peripherals and yields (c, p_k, p_k+1, p_k+2). A closed
// run also has the face from its last peripheral back to p0, which is not
// repeated; its opening control token carries the flag.
struct Patch {
  VertexId center = -1;
  struct Run {
    std::vector<VertexId> peripherals;
    std::vector<bool> quad_step;  // one entry per face of the run
    bool closed = false;
  };
  std::vector<Run> runs;
  std::vector<std::size_t> faces;  // mesh face indices, encoding order

  std::size_t peripheral_count() const;
};

// Greedy cover: repeatedly take the vertex with the most uncovered incident
// faces (lowest index on ties) and gather those faces into one patch.
std::vector<Patch> build_patches(const Mesh& mesh);

// Requires a canonical mesh (see meshtopo::canonicalize) on cfg.grid().
TokenSequence encode(const Mesh& mesh, const Config& cfg = {});
Mesh decode(const TokenSequence& seq, const Config& cfg = {});

// Faces in decode order, as quantized corner positions, grouped by patch.
struct DecodedFace {
  std::vector<Bins> corners;
  std::size_t patch;
};
std::vector<DecodedFace> decode_faces(const TokenSequence& seq, const Config& cfg = {});

// (9 x triangle-equivalent faces) / tokens; a quad counts as two triangles.
double compression_ratio(const TokenSequence& seq, const Mesh& mesh);

// Faces [start_face, start_face + max_faces) extended left to the start of
// the patch containing start_face. The first face span absorbs that prefix,
// so consecutive windows list every face exactly once.
// A closed run cut short by the window end is reopened, so the window does
// not decode to a closing face it does not hold.
TokenSequence truncate_window(const TokenSequence& seq, std::size_t max_faces,
                              std::size_t start_face);

}  // namespace meshtopo::bpt
