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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "meshtopo/meshtopo.h"

namespace {

namespace fs = std::filesystem;

// Flattens a fixture into the C layout.
mt_mesh* make_mesh(const meshtopo::Mesh& m) {
  std::vector<double> xyz;
  for (const auto& v : m.vertices) xyz.insert(xyz.end(), {v.x, v.y, v.z});
  std::vector<int32_t> corners;
  std::vector<uint8_t> arity;
  for (const auto& f : m.faces) {
    for (std::size_t k = 0; k < f.size(); ++k) corners.push_back(f[k]);
    arity.push_back(static_cast<uint8_t>(f.size()));
  }
  mt_mesh* out = nullptr;
  EXPECT_EQ(mt_mesh_create(xyz.data(), m.vertices.size(), corners.data(), arity.data(),
                           arity.size(), &out),
            MT_OK)
      << mt_last_error();
  return out;
}

TEST(CApi, StatusNamesAndErrors) {
  EXPECT_STREQ(mt_status_name(MT_OK), "ok");
  EXPECT_NE(std::string(mt_version()), "");
  mt_mesh* m = nullptr;
  EXPECT_EQ(mt_mesh_load_obj("/nonexistent/x.obj", &m), MT_ERR_IO);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(mt_last_error()).find("x.obj"), std::string::npos);
  EXPECT_EQ(mt_mesh_load_obj(nullptr, &m), MT_ERR_INVALID_ARGUMENT);

  const double xyz[] = {0, 0, 0, 1, 0, 0, 0, 1, 0};
  const int32_t bad[] = {0, 1, 7};
  const uint8_t arity[] = {3};
  EXPECT_EQ(mt_mesh_create(xyz, 3, bad, arity, 1, &m), MT_ERR_INDEX);
  const uint8_t five[] = {5};
  EXPECT_EQ(mt_mesh_create(xyz, 3, bad, five, 1, &m), MT_ERR_UNSUPPORTED_FACE);

  mt_mesh_free(nullptr);
  mt_tokens_free(nullptr);
  mt_model_free(nullptr);
}

TEST(CApi, TokenizeRoundTrip) {
  mt_mesh* mesh = make_mesh(meshtopo::testing::tetrahedron());
  mt_bpt_config cfg;
  mt_bpt_config_default(&cfg);
  EXPECT_EQ(mt_bpt_vocab_size(&cfg), 266245);
  mt_tokens* toks = nullptr;
  size_t dropped = 99;
  ASSERT_EQ(mt_tokenize(mesh, &cfg, &toks, &dropped), MT_OK) << mt_last_error();
  EXPECT_EQ(dropped, 0u);
  EXPECT_EQ(mt_tokens_size(toks), 16u);
  EXPECT_EQ(mt_tokens_face_count(toks), 4u);
  EXPECT_EQ(mt_tokens_data(toks)[0], 266243);
  int equal = 0;
  ASSERT_EQ(mt_tokens_verify(toks, mesh, &cfg, &equal), MT_OK);
  EXPECT_EQ(equal, 1);

  char* json = nullptr;
  ASSERT_EQ(mt_tokens_to_json(toks, "tet", &json), MT_OK);
  mt_tokens* back = nullptr;
  ASSERT_EQ(mt_tokens_from_json(json, &back), MT_OK) << mt_last_error();
  EXPECT_STREQ(mt_tokens_id(back), "tet");
  EXPECT_EQ(mt_tokens_size(back), 16u);
  mt_free(json);

  mt_mesh* decoded = nullptr;
  ASSERT_EQ(mt_detokenize(back, &cfg, &decoded), MT_OK);
  EXPECT_EQ(mt_mesh_face_count(decoded), 4u);
  mt_topology topo{};
  ASSERT_EQ(mt_mesh_topology(decoded, &topo), MT_OK);
  EXPECT_EQ(topo.euler, 2);
  EXPECT_EQ(topo.boundary_edges, 0u);
  EXPECT_EQ(topo.edges, 6u);

  const int32_t junk[] = {4097};
  mt_tokens* raw = nullptr;
  ASSERT_EQ(mt_tokens_create(junk, 1, &cfg, &raw), MT_OK);
  mt_mesh* none = nullptr;
  EXPECT_EQ(mt_detokenize(raw, &cfg, &none), MT_ERR_DECODE);

  mt_tokens_free(raw);
  mt_mesh_free(decoded);
  mt_tokens_free(back);
  mt_tokens_free(toks);
  mt_mesh_free(mesh);
}

TEST(CApi, EvaluateAndDominate) {
  mt_mesh* mesh = make_mesh(meshtopo::testing::tetrahedron());
  mt_cloud* cloud = nullptr;
  ASSERT_EQ(mt_mesh_sample_surface(mesh, 2000, 4, &cloud), MT_OK);
  mt_report r{};
  ASSERT_EQ(mt_evaluate(mesh, cloud, 2000, 0, &r), MT_OK) << mt_last_error();
  EXPECT_EQ(r.ber, 0.0);
  EXPECT_LT(r.hd, 0.2);
  mt_report worse = r;
  worse.ber = 0.5;
  worse.ts = r.ts - 0.1;
  worse.hd = r.hd + 1;
  EXPECT_EQ(mt_dominates(&r, &worse), 1);
  EXPECT_EQ(mt_dominates(&worse, &r), 0);
  EXPECT_EQ(mt_dominates(&r, &r), 0);
  char* json = nullptr;
  ASSERT_EQ(mt_report_to_json(&r, "tet", "c", &json), MT_OK);
  EXPECT_NE(std::string(json).find("\"cond\":\"c\""), std::string::npos);
  mt_free(json);
  mt_cloud_free(cloud);
  mt_mesh_free(mesh);
}

TEST(CApi, ModelCheckpointAndLoss) {
  mt_model_shape shape;
  mt_model_shape_default(&shape);
  shape.vocab_size = 12;
  shape.embed_dim = 4;
  shape.context = 8;
  mt_model* model = nullptr;
  ASSERT_EQ(mt_model_random(&shape, 3, 0.2, &model), MT_OK) << mt_last_error();
  const fs::path path = meshtopo::testing::scratch_dir("capi") / "model.json";
  fs::create_directories(path.parent_path());
  ASSERT_EQ(mt_model_save(model, path.c_str()), MT_OK);
  mt_model* loaded = nullptr;
  ASSERT_EQ(mt_model_load(path.c_str(), &loaded), MT_OK);
  EXPECT_EQ(mt_model_parameter_count(loaded), mt_model_parameter_count(model));

  const char* triplet =
      R"({"cond":"c","win":{"id":"w","tokens":[1,2,3],"mask":[1,0,1]},)"
      R"("lose":{"id":"l","tokens":[3,2,1],"mask":[0,1,0]}})";
  double loss = 0;
  ASSERT_EQ(mt_mdpo_loss(loaded, model, triplet, 0.1, &loss), MT_OK) << mt_last_error();
  EXPECT_NEAR(loss, std::log(2.0), 1e-12);
  EXPECT_EQ(mt_mdpo_loss(loaded, model, triplet, -1.0, &loss), MT_ERR_DOMAIN);

  int32_t* out = nullptr;
  size_t count = 0;
  ASSERT_EQ(mt_generate(model, nullptr, 20, 8, 5, -1, &out, &count), MT_OK);
  EXPECT_EQ(count, 20u);
  for (size_t i = 0; i < count; ++i) {
    EXPECT_GE(out[i], 0);
    EXPECT_LT(out[i], 12);
  }
  mt_free(out);
  mt_model_free(loaded);
  mt_model_free(model);
}

TEST(CApi, SeamsCutFlatten) {
  const int32_t seam_tokens[] = {1023, 0, 512, 1023, 1023, 512};
  mt_seams* seams = nullptr;
  ASSERT_EQ(mt_seams_from_tokens(seam_tokens, 6, 1024, &seams), MT_OK);
  EXPECT_EQ(mt_seams_count(seams), 1u);
  int32_t* enc = nullptr;
  size_t n = 0;
  ASSERT_EQ(mt_seams_encode(seams, 1024, &enc, &n), MT_OK);
  EXPECT_EQ(std::vector<int32_t>(enc, enc + n), std::vector<int32_t>(seam_tokens, seam_tokens + 6));
  mt_free(enc);
  EXPECT_EQ(mt_seams_from_tokens(seam_tokens, 5, 1024, &seams), MT_ERR_FRAMING);

  mt_mesh* cyl = make_mesh(meshtopo::testing::cylinder(12, 4));
  mt_mesh* cut = nullptr;
  mt_cut_report report{};
  ASSERT_EQ(mt_cut_seams(cyl, seams, &cut, &report), MT_OK) << mt_last_error();
  EXPECT_EQ(report.segments, 1u);
  EXPECT_EQ(report.disk_charts, 1u);
  EXPECT_EQ(report.boundary_edges_after, report.boundary_edges_before + 8);
  mt_mesh* flat = nullptr;
  size_t charts = 0;
  ASSERT_EQ(mt_flatten(cut, 2, &flat, &charts), MT_OK) << mt_last_error();
  EXPECT_EQ(charts, 1u);
  EXPECT_EQ(mt_mesh_has_uvs(flat), 1);
  mt_distortion d{};
  double* energies = nullptr;
  ASSERT_EQ(mt_distortion_measure(flat, &d, &energies), MT_OK);
  EXPECT_EQ(d.faces, 96u);
  EXPECT_EQ(d.degenerate_faces, 0u);
  EXPECT_TRUE(std::isfinite(energies[95]));
  mt_free(energies);

  mt_mesh* nope = nullptr;
  EXPECT_EQ(mt_flatten(cyl, 1, &nope, &charts), MT_ERR_TOPOLOGY);
  EXPECT_EQ(mt_distortion_measure(cyl, &d, nullptr), MT_ERR_PRECONDITION);

  const int32_t path[] = {0, 2};
  const size_t lengths[] = {2};
  EXPECT_EQ(mt_cut_paths(cyl, path, lengths, 1, &nope, &report), MT_ERR_INVALID_PATH);

  mt_mesh_free(flat);
  mt_mesh_free(cut);
  mt_mesh_free(cyl);
  mt_seams_free(seams);
}

}  // namespace
