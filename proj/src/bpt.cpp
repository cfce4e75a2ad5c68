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

#include "meshtopo/bpt.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "meshtopo/error.hpp"

namespace meshtopo::bpt {

void Config::validate() const {
  if (levels < 2) fail(ErrorCode::kDomain, "levels must be >= 2");
  if (blocks_per_axis < 1 || offsets_per_axis < 1) {
    fail(ErrorCode::kDomain, "blocks and offsets per axis must be >= 1");
  }
  if (static_cast<long long>(blocks_per_axis) * offsets_per_axis != levels) {
    fail(ErrorCode::kDomain, "blocks_per_axis * offsets_per_axis must equal levels (" +
                                 std::to_string(blocks_per_axis) + " * " +
                                 std::to_string(offsets_per_axis) + " != " +
                                 std::to_string(levels) + ")");
  }
  const long long b = blocks_per_axis;
  const long long o = offsets_per_axis;
  if (b * b * b + o * o * o + 3 > std::numeric_limits<std::int32_t>::max()) {
    fail(ErrorCode::kDomain, "vocabulary does not fit in 32-bit token ids");
  }
}

std::int32_t Config::block_count() const {
  return blocks_per_axis * blocks_per_axis * blocks_per_axis;
}

std::int32_t Config::offset_count() const {
  return offsets_per_axis * offsets_per_axis * offsets_per_axis;
}

void check_structure(const TokenSequence& seq) {
  auto check_partition = [&](const std::vector<Span>& spans, const char* what,
                             bool allow_empty) {
    std::size_t cursor = 0;
    for (const Span& s : spans) {
      if (s.first != cursor || s.second < s.first || (s.second == s.first && !allow_empty)) {
        fail(ErrorCode::kConsistency, std::string(what) +
                                          " spans do not partition the tokens at " +
                                          std::to_string(cursor));
      }
      cursor = s.second;
    }
    if (cursor != seq.tokens.size()) {
      fail(ErrorCode::kConsistency,
           std::string(what) + " spans end at " + std::to_string(cursor) +
               " but the sequence has " + std::to_string(seq.tokens.size()) + " tokens");
    }
  };
  check_partition(seq.patch_spans, "patch", false);
  check_partition(seq.face_spans, "face", true);
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (seq.tokens[i] < 0 || seq.tokens[i] >= seq.vocab_size) {
      fail(ErrorCode::kConsistency, "token " + std::to_string(i) + " = " +
                                        std::to_string(seq.tokens[i]) +
                                        " outside vocabulary of " +
                                        std::to_string(seq.vocab_size));
    }
  }
}

BlockOffset block_index(const Bins& bins, const Config& cfg) {
  const int n_off = cfg.offsets_per_axis;
  const int n_blk = cfg.blocks_per_axis;
  std::int32_t block = 0;
  std::int32_t offset = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const int bin = bins[axis];
    if (bin < 0 || bin >= cfg.levels) {
      fail(ErrorCode::kDomain, "bin " + std::to_string(bin) + " outside [0, " +
                                   std::to_string(cfg.levels - 1) + "]");
    }
    block = block * n_blk + bin / n_off;
    offset = offset * n_off + bin % n_off;
  }
  return {block, offset};
}

Bins block_unindex(std::int32_t block, std::int32_t offset, const Config& cfg) {
  if (block < 0 || block >= cfg.block_count() || offset < 0 ||
      offset >= cfg.offset_count()) {
    fail(ErrorCode::kDomain, "block/offset id out of range (" +
                                 std::to_string(block) + ", " +
                                 std::to_string(offset) + ")");
  }
  Bins bins{};
  for (int axis = 2; axis >= 0; --axis) {
    bins[axis] = (block % cfg.blocks_per_axis) * cfg.offsets_per_axis +
                 offset % cfg.offsets_per_axis;
    block /= cfg.blocks_per_axis;
    offset /= cfg.offsets_per_axis;
  }
  return bins;
}

std::size_t Patch::peripheral_count() const {
  std::size_t n = 0;
  for (const Run& r : runs) n += r.peripherals.size();
  return n;
}

namespace {

// A face seen from the patch center: c, start, [mid], end.
struct FanFace {
  std::size_t face;
  VertexId start;
  VertexId mid;  // -1 for triangles
  VertexId end;
};

FanFace orient_around(const Face& f, std::size_t face_index, VertexId center) {
  const auto it = std::find(f.begin(), f.end(), center);
  const auto k = static_cast<std::size_t>(it - f.begin());
  const std::size_t n = f.size();
  FanFace ff{face_index, f[(k + 1) % n], -1, f[(k + n - 1) % n]};
  if (n == 4) ff.mid = f[(k + 2) % n];
  return ff;
}

std::vector<Patch::Run> chain_fan(std::vector<FanFace> remaining,
                                  std::vector<std::size_t>& face_order) {
  std::vector<Patch::Run> runs;
  auto take = [&](std::size_t i) {
    FanFace f = remaining[i];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
    return f;
  };
  while (!remaining.empty()) {
    // Prefer the head of an open chain: a face whose start vertex closes no
    // other remaining face. Otherwise every chain is a cycle.
    std::size_t pick = remaining.size();
    bool cycle = false;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const bool is_head = std::none_of(
          remaining.begin(), remaining.end(),
          [&](const FanFace& g) { return g.end == remaining[i].start; });
      if (!is_head) continue;
      if (pick == remaining.size() || remaining[i].start < remaining[pick].start) pick = i;
    }
    if (pick == remaining.size()) {
      cycle = true;
      pick = 0;
      for (std::size_t i = 1; i < remaining.size(); ++i) {
        if (remaining[i].start < remaining[pick].start) pick = i;
      }
    }
    Patch::Run run;
    FanFace cur = take(pick);
    run.peripherals.push_back(cur.start);
    for (;;) {
      face_order.push_back(cur.face);
      if (cur.mid >= 0) run.peripherals.push_back(cur.mid);
      run.peripherals.push_back(cur.end);
      run.quad_step.push_back(cur.mid >= 0);
      // `remaining` stays in face-index order, so the first match is the
      // lowest face index.
      const auto next = std::find_if(remaining.begin(), remaining.end(),
                                     [&](const FanFace& g) { return g.start == cur.end; });
      if (next == remaining.end()) break;
      cur = take(static_cast<std::size_t>(next - remaining.begin()));
    }
    // A cycle can still stop short on non-manifold fans.
    if (cycle && run.peripherals.back() == run.peripherals.front()) {
      run.peripherals.pop_back();
      run.closed = true;
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace

std::vector<Patch> build_patches(const Mesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<std::vector<std::size_t>> incident(nv);
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    for (VertexId v : mesh.faces[fi]) incident[v].push_back(fi);
  }
  std::vector<int> uncovered(nv);
  // Ordered by (most uncovered faces, lowest index).
  std::set<std::pair<int, VertexId>> queue;
  for (std::size_t v = 0; v < nv; ++v) {
    uncovered[v] = static_cast<int>(incident[v].size());
    if (uncovered[v] > 0) queue.insert({-uncovered[v], static_cast<VertexId>(v)});
  }
  std::vector<char> covered(mesh.faces.size(), 0);

  std::vector<Patch> patches;
  while (!queue.empty()) {
    const VertexId center = queue.begin()->second;
    Patch patch;
    patch.center = center;
    std::vector<FanFace> fan;
    for (std::size_t fi : incident[center]) {
      if (covered[fi]) continue;
      covered[fi] = 1;
      fan.push_back(orient_around(mesh.faces[fi], fi, center));
      for (VertexId v : mesh.faces[fi]) {
        queue.erase({-uncovered[v], v});
        if (--uncovered[v] > 0) queue.insert({-uncovered[v], v});
      }
    }
    patch.runs = chain_fan(std::move(fan), patch.faces);
    patches.push_back(std::move(patch));
  }
  return patches;
}

TokenSequence encode(const Mesh& mesh, const Config& cfg) {
  cfg.validate();
  const QuantGrid grid = cfg.grid();
  if (!is_canonical(mesh, grid)) {
    fail(ErrorCode::kPrecondition, "encode requires a canonical mesh");
  }
  TokenSequence seq;
  seq.vocab_size = cfg.vocab_size();
  if (mesh.faces.empty()) return seq;

  std::vector<BlockOffset> ids(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    ids[v] = block_index(quantize(mesh.vertices[v], grid), cfg);
  }
  auto emit_vertex = [&](VertexId v) {
    seq.tokens.push_back(cfg.block_token(ids[v].block));
    seq.tokens.push_back(cfg.offset_token(ids[v].offset));
  };

  for (const Patch& patch : build_patches(mesh)) {
    const std::size_t patch_begin = seq.tokens.size();
    std::size_t face_begin = patch_begin;
    for (std::size_t r = 0; r < patch.runs.size(); ++r) {
      const Patch::Run& run = patch.runs[r];
      if (r == 0) {
        seq.tokens.push_back(run.closed ? cfg.closed_patch_token() : kPatchStart);
        emit_vertex(patch.center);
      } else {
        seq.tokens.push_back(run.closed ? cfg.closed_break_token() : cfg.fan_break_token());
      }
      emit_vertex(run.peripherals[0]);
      std::size_t k = 0;
      for (std::size_t i = 0; i < run.quad_step.size(); ++i) {
        // The closing face of a closed run ends at p0, which is implicit.
        const bool closing = run.closed && i + 1 == run.quad_step.size();
        if (run.quad_step[i]) {
          seq.tokens.push_back(cfg.quad_token());
          emit_vertex(run.peripherals[k + 1]);
          if (!closing) emit_vertex(run.peripherals[k + 2]);
          k += 2;
        } else {
          if (!closing) emit_vertex(run.peripherals[k + 1]);
          k += 1;
        }
        seq.face_spans.push_back({face_begin, seq.tokens.size()});
        face_begin = seq.tokens.size();
      }
    }
    seq.patch_spans.push_back({patch_begin, seq.tokens.size()});
  }
  return seq;
}

namespace {

class Reader {
 public:
  Reader(const TokenSequence& seq, const Config& cfg) : seq_(seq), cfg_(cfg) {}

  bool done() const { return pos_ >= seq_.tokens.size(); }
  std::size_t pos() const { return pos_; }
  std::int32_t peek() const { return seq_.tokens[pos_]; }
  void advance() { ++pos_; }

  bool at_block() const {
    return !done() && peek() >= 1 && peek() <= cfg_.block_count();
  }

  Bins vertex() {
    if (done()) error("truncated sequence, expected a vertex");
    if (!at_block()) error("expected a block token, got " + std::to_string(peek()));
    const std::int32_t block = peek() - 1;
    advance();
    if (done()) error("truncated vertex pair");
    const std::int32_t tok = peek();
    if (tok <= cfg_.block_count() || tok >= cfg_.fan_break_token()) {
      error("expected an offset token, got " + std::to_string(tok));
    }
    advance();
    return block_unindex(block, tok - 1 - cfg_.block_count(), cfg_);
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kDecode, "token " + std::to_string(pos_) + ": " + what);
  }

 private:
  const TokenSequence& seq_;
  const Config& cfg_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<DecodedFace> decode_faces(const TokenSequence& seq, const Config& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (seq.tokens[i] < 0 || seq.tokens[i] >= cfg.vocab_size()) {
      fail(ErrorCode::kDecode, "token " + std::to_string(i) + ": id " +
                                   std::to_string(seq.tokens[i]) +
                                   " outside vocabulary");
    }
  }
  std::vector<DecodedFace> faces;
  Reader rd(seq, cfg);
  std::size_t patch = 0;
  const auto is_patch_start = [&](std::int32_t t) {
    return t == kPatchStart || t == cfg.closed_patch_token();
  };
  auto emit = [&](DecodedFace face) {
    for (std::size_t a = 0; a < face.corners.size(); ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        if (face.corners[a] == face.corners[b]) rd.error("face repeats a vertex");
      }
    }
    faces.push_back(std::move(face));
  };
  while (!rd.done()) {
    if (!is_patch_start(rd.peek())) rd.error("expected patch start");
    bool closed = rd.peek() == cfg.closed_patch_token();
    rd.advance();
    const Bins center = rd.vertex();
    bool first_run = true;
    while (!rd.done() && !is_patch_start(rd.peek())) {
      if (!first_run) {
        if (rd.peek() != cfg.fan_break_token() && rd.peek() != cfg.closed_break_token()) {
          rd.error("expected fan break");
        }
        closed = rd.peek() == cfg.closed_break_token();
        rd.advance();
      }
      first_run = false;
      const Bins first = rd.vertex();
      Bins prev = first;
      std::size_t steps = 0;
      bool wrapped = false;
      while (!rd.done() && (rd.at_block() || rd.peek() == cfg.quad_token())) {
        DecodedFace face{{center, prev}, patch};
        if (rd.peek() == cfg.quad_token()) {
          rd.advance();
          face.corners.push_back(rd.vertex());
          if (closed && !rd.at_block()) {
            // Closing quad of a closed run.
            face.corners.push_back(first);
            emit(std::move(face));
            ++steps;
            wrapped = true;
            break;
          }
        }
        prev = rd.vertex();
        face.corners.push_back(prev);
        emit(std::move(face));
        ++steps;
      }
      if (steps == 0) {
        rd.error("patch run with fewer than 2 peripherals");
      }
      if (closed && !wrapped) emit({{center, prev, first}, patch});
    }
    if (first_run) rd.error("patch with fewer than 2 peripherals");
    ++patch;
  }
  return faces;
}

Mesh decode(const TokenSequence& seq, const Config& cfg) {
  const QuantGrid grid = cfg.grid();
  Mesh raw;
  for (const DecodedFace& f : decode_faces(seq, cfg)) {
    Face face;
    for (const Bins& b : f.corners) {
      face.push_back(static_cast<VertexId>(raw.vertices.size()));
      raw.vertices.push_back(dequantize(b, grid));
    }
    raw.faces.push_back(std::move(face));
  }
  return canonicalize(raw, grid);
}

double compression_ratio(const TokenSequence& seq, const Mesh& mesh) {
  if (seq.tokens.empty()) {
    fail(ErrorCode::kDomain, "compression ratio of an empty sequence");
  }
  const double triangles = static_cast<double>(mesh.faces.size() + mesh.quad_count());
  return 9.0 * triangles / static_cast<double>(seq.tokens.size());
}

TokenSequence truncate_window(const TokenSequence& seq, std::size_t max_faces,
                              std::size_t start_face) {
  if (max_faces == 0) fail(ErrorCode::kDomain, "window must hold at least one face");
  if (start_face >= seq.face_spans.size()) {
    fail(ErrorCode::kPrecondition, "start face " + std::to_string(start_face) +
                                       " beyond last face (" +
                                       std::to_string(seq.face_spans.size()) + " faces)");
  }
  const std::size_t end_face = std::min(seq.face_spans.size(), start_face + max_faces);
  const std::size_t anchor = seq.face_spans[start_face].first;
  const auto patch = std::find_if(seq.patch_spans.begin(), seq.patch_spans.end(),
                                  [&](const Span& s) {
                                    return s.first <= anchor && anchor < s.second;
                                  });
  if (patch == seq.patch_spans.end()) {
    fail(ErrorCode::kConsistency, "face span outside every patch span");
  }
  const std::size_t begin = patch->first;
  const std::size_t end = seq.face_spans[end_face - 1].second;

  TokenSequence out;
  out.vocab_size = seq.vocab_size;
  out.tokens.assign(seq.tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                    seq.tokens.begin() + static_cast<std::ptrdiff_t>(end));
  for (std::size_t f = start_face; f < end_face; ++f) {
    const Span& s = seq.face_spans[f];
    out.face_spans.push_back({f == start_face ? 0 : s.first - begin, s.second - begin});
  }
  for (const Span& s : seq.patch_spans) {
    if (s.second <= begin || s.first >= end) continue;
    out.patch_spans.push_back(
        {std::max(s.first, begin) - begin, std::min(s.second, end) - begin});
  }

  // Controls occupy the top four ids: fan break, quad, closed patch start,
  // closed fan break.
  const std::int32_t fan_break = seq.vocab_size - 4;
  const std::int32_t closed_patch = seq.vocab_size - 2;
  const std::int32_t closed_break = seq.vocab_size - 1;
  const auto opens_run = [&](std::int32_t t) {
    return t == kPatchStart || t == fan_break || t == closed_patch || t == closed_break;
  };
  // The last run continues past the window unless the next face opens a run.
  bool cut_short = false;
  if (end_face < seq.face_spans.size()) {
    const Span& next = seq.face_spans[end_face];
    cut_short = next.first == next.second || !opens_run(seq.tokens[next.first]);
  }
  if (cut_short) {
    for (std::size_t i = out.tokens.size(); i-- > 0;) {
      std::int32_t& t = out.tokens[i];
      if (!opens_run(t)) continue;
      if (t == closed_patch) t = kPatchStart;
      if (t == closed_break) t = fan_break;
      break;
    }
  }
  return out;
}

}  // namespace meshtopo::bpt
