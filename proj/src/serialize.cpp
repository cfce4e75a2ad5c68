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

#include "meshtopo/serialize.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "meshtopo/error.hpp"

namespace meshtopo::io {
namespace {

using json = nlohmann::ordered_json;

json spans_json(const std::vector<bpt::Span>& spans) {
  json out = json::array();
  for (const auto& [a, b] : spans) out.push_back({a, b});
  return out;
}

std::vector<bpt::Span> spans_from(const json& j) {
  std::vector<bpt::Span> out;
  for (const json& s : j) {
    if (!s.is_array() || s.size() != 2) fail(ErrorCode::kParse, "span must be [start, end]");
    out.emplace_back(s[0].get<std::size_t>(), s[1].get<std::size_t>());
  }
  return out;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object()) fail(ErrorCode::kParse, "expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) fail(ErrorCode::kParse, std::string("missing field \"") + name + "\"");
  return *it;
}

std::string optional_string(const json& j, const char* name) {
  const auto it = j.find(name);
  return it == j.end() || it->is_null() ? std::string() : it->get<std::string>();
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
}

// Runs `fn` on every non-blank line, prefixing errors with the location.
template <typename Fn>
void for_each_line(std::istream& in, const std::string& source, Fn fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(line);
    } catch (const Error& e) {
      throw Error(e.code(), source + ":" + std::to_string(number) + ": " + e.what());
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

json sample_json(const preference::Sample& s) {
  json out = {{"tokens", s.tokens}, {"mask", s.mask}};
  if (!s.mesh_id.empty()) out["id"] = s.mesh_id;
  return out;
}

preference::Sample sample_from(const json& j) {
  preference::Sample s;
  s.mesh_id = optional_string(j, "id");
  s.tokens = field(j, "tokens").get<std::vector<std::int32_t>>();
  s.mask = field(j, "mask").get<preference::MaskVector>();
  if (s.mask.size() != s.tokens.size()) {
    fail(ErrorCode::kConsistency, "mask length differs from token count");
  }
  for (auto bit : s.mask) {
    if (bit > 1) fail(ErrorCode::kParse, "mask entries must be 0 or 1");
  }
  return s;
}

}  // namespace

std::string token_record(const TokenRecord& rec) {
  json j = {{"id", rec.id},
            {"vocab", rec.seq.vocab_size},
            {"tokens", rec.seq.tokens},
            {"patch_spans", spans_json(rec.seq.patch_spans)},
            {"face_spans", spans_json(rec.seq.face_spans)}};
  if (!rec.cond.empty()) j["cond"] = rec.cond;
  return j.dump();
}

TokenRecord parse_token_record(std::string_view line) {
  const json j = parse(line);
  TokenRecord rec;
  try {
    rec.id = field(j, "id").get<std::string>();
    rec.cond = optional_string(j, "cond");
    rec.seq.vocab_size = field(j, "vocab").get<std::int32_t>();
    rec.seq.tokens = field(j, "tokens").get<std::vector<std::int32_t>>();
    if (j.contains("patch_spans")) rec.seq.patch_spans = spans_from(j["patch_spans"]);
    if (j.contains("face_spans")) rec.seq.face_spans = spans_from(j["face_spans"]);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
  return rec;
}

std::vector<TokenRecord> read_token_records(std::istream& in, const std::string& source) {
  std::vector<TokenRecord> out;
  for_each_line(in, source, [&](const std::string& line) {
    out.push_back(parse_token_record(line));
  });
  return out;
}

std::string report_json(const metrics::QualityReport& report, const std::string& cond) {
  json j = {{"id", report.mesh_id}, {"ber", report.ber}, {"ts", report.ts}, {"hd", report.hd}};
  if (report.nonmanifold_edges > 0) j["nonmanifold_edges"] = report.nonmanifold_edges;
  if (!cond.empty()) j["cond"] = cond;
  return j.dump();
}

ReportRecord parse_report(std::string_view text) {
  const json j = parse(text);
  ReportRecord rec;
  try {
    rec.report.mesh_id = field(j, "id").get<std::string>();
    rec.report.ber = field(j, "ber").get<double>();
    rec.report.ts = field(j, "ts").get<double>();
    rec.report.hd = field(j, "hd").get<double>();
    rec.report.nonmanifold_edges = j.value("nonmanifold_edges", std::size_t{0});
    rec.cond = optional_string(j, "cond");
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
  return rec;
}

std::vector<ReportRecord> read_reports(std::istream& in, const std::string& source) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  // A whole-document object first, then fall back to one record per line.
  if (json::accept(text)) {
    const json j = json::parse(text);
    if (j.is_object()) return {parse_report(text)};
  }
  std::vector<ReportRecord> out;
  std::istringstream lines(text);
  for_each_line(lines, source, [&](const std::string& line) {
    out.push_back(parse_report(line));
  });
  return out;
}

std::string triplet_record(const preference::PreferenceTriplet& t) {
  return json{{"cond", t.condition_id}, {"win", sample_json(t.winner)},
              {"lose", sample_json(t.loser)}}
      .dump();
}

preference::PreferenceTriplet parse_triplet(std::string_view line) {
  const json j = parse(line);
  preference::PreferenceTriplet t;
  try {
    t.condition_id = field(j, "cond").get<std::string>();
    t.winner = sample_from(field(j, "win"));
    t.loser = sample_from(field(j, "lose"));
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
  return t;
}

std::vector<preference::PreferenceTriplet> read_triplets(std::istream& in,
                                                         const std::string& source) {
  std::vector<preference::PreferenceTriplet> out;
  for_each_line(in, source, [&](const std::string& line) {
    out.push_back(parse_triplet(line));
  });
  return out;
}

std::string mask_record(const std::string& id, const preference::MaskVector& mask) {
  return json{{"id", id}, {"mask", mask}}.dump();
}

std::string model_json(const mdpo::ToyARModel& model) {
  const auto& s = model.shape();
  json segments = json::array();
  for (const auto& seg : model.segments()) {
    const auto values = model.parameters().subspan(seg.offset, seg.size());
    segments.push_back({{"name", seg.name},
                        {"rows", seg.rows},
                        {"cols", seg.cols},
                        {"values", std::vector<double>(values.begin(), values.end())}});
  }
  const json j = {{"format", "meshtopo-toy-ar"},
                  {"shape",
                   {{"vocab_size", s.vocab_size},
                    {"embed_dim", s.embed_dim},
                    {"context", s.context},
                    {"layers", s.layers},
                    {"cond_dim", s.cond_dim}}},
                  {"segments", segments}};
  return j.dump(1);
}

mdpo::ToyARModel parse_model(std::string_view text) {
  const json j = parse(text);
  try {
    if (j.value("format", "") != "meshtopo-toy-ar") {
      fail(ErrorCode::kParse, "not a meshtopo-toy-ar checkpoint");
    }
    const json& sj = field(j, "shape");
    mdpo::ModelShape shape;
    shape.vocab_size = field(sj, "vocab_size").get<int>();
    shape.embed_dim = field(sj, "embed_dim").get<int>();
    shape.context = field(sj, "context").get<int>();
    shape.layers = field(sj, "layers").get<int>();
    shape.cond_dim = field(sj, "cond_dim").get<int>();
    shape.validate();
    mdpo::ToyARModel model(shape);
    const json& segments = field(j, "segments");
    if (segments.size() != model.segments().size()) {
      fail(ErrorCode::kParse, "checkpoint segment count does not match its shape");
    }
    for (const json& seg : segments) {
      const std::string name = field(seg, "name").get<std::string>();
      auto dst = model.segment(name);
      const auto values = field(seg, "values").get<std::vector<double>>();
      if (values.size() != dst.size()) {
        fail(ErrorCode::kParse, "segment " + name + " has " + std::to_string(values.size()) +
                                    " values, expected " + std::to_string(dst.size()));
      }
      std::copy(values.begin(), values.end(), dst.begin());
    }
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
}

void save_model(const mdpo::ToyARModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << model_json(model) << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

mdpo::ToyARModel load_model(const std::filesystem::path& path) {
  try {
    return parse_model(read_text(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    rethrow_with_context(e, path.string());
  }
}

std::string log_record(std::size_t step, double loss, double margin) {
  return json{{"step", step}, {"loss", loss}, {"margin", margin}}.dump();
}

std::string seam_record(const SeamRecord& rec) {
  return json{{"id", rec.id}, {"tokens", rec.tokens}}.dump();
}

std::vector<SeamRecord> read_seam_records(std::istream& in, const std::string& source) {
  std::vector<SeamRecord> out;
  for_each_line(in, source, [&](const std::string& line) {
    const json j = parse(line);
    out.push_back({field(j, "id").get<std::string>(),
                   field(j, "tokens").get<std::vector<int>>()});
  });
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace meshtopo::io
