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

#include "meshtopo/mesh_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "meshtopo/error.hpp"

namespace meshtopo {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line_no,
                              const std::string& what) {
  fail(ErrorCode::kParse, source + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view tok, const std::string& source,
                    std::size_t line_no) {
  double value = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_error(source, line_no, "invalid number '" + std::string(tok) + "'");
  }
  return value;
}

long parse_long(std::string_view tok, const std::string& source,
                std::size_t line_no) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_error(source, line_no, "invalid index '" + std::string(tok) + "'");
  }
  return value;
}

// OBJ indices are 1-based; negative values count back from the end.
int resolve_index(long raw, std::size_t count, const std::string& source,
                  std::size_t line_no) {
  long idx = raw > 0 ? raw - 1 : static_cast<long>(count) + raw;
  if (raw == 0 || idx < 0 || idx >= static_cast<long>(count)) {
    fail(ErrorCode::kIndex, source + ":" + std::to_string(line_no) + ": index " +
                                std::to_string(raw) + " out of range (" +
                                std::to_string(count) + " available)");
  }
  return static_cast<int>(idx);
}

bool is_ignored_keyword(std::string_view kw) {
  return kw == "vt" || kw == "vn" || kw == "o" || kw == "g" || kw == "s" ||
         kw == "mtllib" || kw == "usemtl";
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Mesh read_obj(std::istream& in, const std::string& source) {
  Mesh mesh;
  std::vector<std::vector<long>> raw_faces;
  std::vector<std::size_t> face_lines;
  std::vector<std::size_t> vertex_count_at_face;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto toks = split_ws(std::string_view(line).substr(0, hash));
    if (toks.empty()) continue;
    const std::string_view kw = toks[0];
    if (kw == "v") {
      if (toks.size() != 4 && toks.size() != 5) {
        parse_error(source, line_no, "vertex record needs 3 coordinates");
      }
      mesh.vertices.push_back({parse_double(toks[1], source, line_no),
                               parse_double(toks[2], source, line_no),
                               parse_double(toks[3], source, line_no)});
    } else if (kw == "f") {
      const std::size_t arity = toks.size() - 1;
      if (arity != 3 && arity != 4) {
        fail(ErrorCode::kUnsupportedFace,
             source + ":" + std::to_string(line_no) + ": face with " +
                 std::to_string(arity) + " vertices (expected 3 or 4)");
      }
      std::vector<long> f;
      for (std::size_t k = 1; k < toks.size(); ++k) {
        const std::string_view corner = toks[k].substr(0, toks[k].find('/'));
        f.push_back(parse_long(corner, source, line_no));
      }
      raw_faces.push_back(std::move(f));
      face_lines.push_back(line_no);
      vertex_count_at_face.push_back(mesh.vertices.size());
    } else if (!is_ignored_keyword(kw)) {
      parse_error(source, line_no, "unsupported record '" + std::string(kw) + "'");
    }
  }
  for (std::size_t i = 0; i < raw_faces.size(); ++i) {
    Face f;
    for (long raw : raw_faces[i]) {
      // Relative indices refer to vertices defined before the face line.
      const std::size_t count = raw < 0 ? vertex_count_at_face[i] : mesh.vertices.size();
      f.push_back(resolve_index(raw, count, source, face_lines[i]));
    }
    for (std::size_t a = 0; a < f.size(); ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        if (f[a] == f[b]) {
          fail(ErrorCode::kIndex, source + ":" + std::to_string(face_lines[i]) +
                                      ": face repeats a vertex");
        }
      }
    }
    mesh.faces.push_back(std::move(f));
  }
  return mesh;
}

Mesh load_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  Mesh mesh = read_obj(in, path.string());
  mesh.name = path.stem().string();
  return mesh;
}

void write_obj(std::ostream& out, const Mesh& mesh) {
  if (!mesh.name.empty()) out << "# " << mesh.name << '\n';
  for (const Vec3& v : mesh.vertices) {
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' '
        << format_double(v.z) << '\n';
  }
  for (const Face& f : mesh.faces) {
    out << 'f';
    for (VertexId v : f) out << ' ' << v + 1;
    out << '\n';
  }
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  validate(mesh);
  auto out = open_out(path);
  write_obj(out, mesh);
  finish_write(out, path);
}

PointCloud read_xyz(std::istream& in, const std::string& source) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(std::string_view(line).substr(0, line.find('#')));
    if (toks.empty()) continue;
    if (toks.size() != 3) parse_error(source, line_no, "expected 'x y z'");
    cloud.points.push_back({parse_double(toks[0], source, line_no),
                            parse_double(toks[1], source, line_no),
                            parse_double(toks[2], source, line_no)});
  }
  return cloud;
}

PointCloud load_xyz(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_xyz(in, path.string());
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
  for (const Vec3& p : cloud.points) {
    out << format_double(p.x) << ' ' << format_double(p.y) << ' '
        << format_double(p.z) << '\n';
  }
}

void save_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_xyz(out, cloud);
  finish_write(out, path);
}

UvMesh read_uv_obj(std::istream& in, const std::string& source) {
  std::vector<Vec3> positions;
  std::vector<Uv> coords;
  struct Corner {
    long v;
    long t;
  };
  std::vector<std::vector<Corner>> raw_faces;
  std::vector<std::size_t> face_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(std::string_view(line).substr(0, line.find('#')));
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) parse_error(source, line_no, "vertex record needs 3 coordinates");
      positions.push_back({parse_double(toks[1], source, line_no),
                           parse_double(toks[2], source, line_no),
                           parse_double(toks[3], source, line_no)});
    } else if (toks[0] == "vt") {
      if (toks.size() < 3) parse_error(source, line_no, "vt record needs 2 coordinates");
      coords.push_back({parse_double(toks[1], source, line_no),
                        parse_double(toks[2], source, line_no)});
    } else if (toks[0] == "f") {
      if (toks.size() != 4 && toks.size() != 5) {
        fail(ErrorCode::kUnsupportedFace,
             source + ":" + std::to_string(line_no) + ": face arity not 3 or 4");
      }
      std::vector<Corner> f;
      for (std::size_t k = 1; k < toks.size(); ++k) {
        const auto slash = toks[k].find('/');
        if (slash == std::string_view::npos) {
          parse_error(source, line_no, "face corner without a uv index");
        }
        const auto rest = toks[k].substr(slash + 1);
        f.push_back({parse_long(toks[k].substr(0, slash), source, line_no),
                     parse_long(rest.substr(0, rest.find('/')), source, line_no)});
      }
      raw_faces.push_back(std::move(f));
      face_lines.push_back(line_no);
    } else if (!is_ignored_keyword(toks[0])) {
      parse_error(source, line_no, "unsupported record '" + std::string(toks[0]) + "'");
    }
  }

  UvMesh out;
  std::map<std::pair<int, int>, VertexId> corner_ids;
  for (std::size_t i = 0; i < raw_faces.size(); ++i) {
    Face f;
    for (const Corner& c : raw_faces[i]) {
      const int v = resolve_index(c.v, positions.size(), source, face_lines[i]);
      const int t = resolve_index(c.t, coords.size(), source, face_lines[i]);
      auto [it, inserted] = corner_ids.try_emplace(
          {v, t}, static_cast<VertexId>(out.mesh.vertices.size()));
      if (inserted) {
        out.mesh.vertices.push_back(positions[v]);
        out.uvs.push_back(coords[t]);
      }
      f.push_back(it->second);
    }
    out.mesh.faces.push_back(std::move(f));
  }
  validate(out.mesh);
  return out;
}

UvMesh load_uv_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  UvMesh m = read_uv_obj(in, path.string());
  m.mesh.name = path.stem().string();
  return m;
}

void write_uv_obj(std::ostream& out, const UvMesh& mesh) {
  if (mesh.uvs.size() != mesh.mesh.vertices.size()) {
    fail(ErrorCode::kConsistency, "uv count does not match vertex count");
  }
  if (!mesh.mesh.name.empty()) out << "# " << mesh.mesh.name << '\n';
  for (const Vec3& v : mesh.mesh.vertices) {
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' '
        << format_double(v.z) << '\n';
  }
  for (const Uv& t : mesh.uvs) {
    out << "vt " << format_double(t[0]) << ' ' << format_double(t[1]) << '\n';
  }
  for (const Face& f : mesh.mesh.faces) {
    out << 'f';
    for (VertexId v : f) out << ' ' << v + 1 << '/' << v + 1;
    out << '\n';
  }
}

void save_uv_obj(const UvMesh& mesh, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_uv_obj(out, mesh);
  finish_write(out, path);
}

}  // namespace meshtopo
