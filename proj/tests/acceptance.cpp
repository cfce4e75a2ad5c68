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

// Acceptance checks. One PASS/FAIL line per criterion; the exit status is
// the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "meshtopo/bpt.hpp"
#include "meshtopo/mesh_io.hpp"
#include "meshtopo/metrics.hpp"
#include "meshtopo/model.hpp"
#include "meshtopo/preference.hpp"
#include "meshtopo/random.hpp"
#include "meshtopo/seam.hpp"
#include "meshtopo/training.hpp"
#include "meshtopo/uv.hpp"

namespace {

using namespace meshtopo;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
using Tokens = std::vector<std::int32_t>;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed expectations for one criterion.
struct Checker {
  Outcome out;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (out.pass) out.detail = what;
    out.pass = false;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string capture(const std::string& cmd, int* status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    *status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  *status = pclose(pipe);
  return out;
}

std::string python(const std::string& script, const std::string& args) {
  int status = 0;
  const std::string out = capture(std::string("'") + MESHTOPO_PYTHON + "' '" + MESHTOPO_ORACLES +
                                      "/" + script + "' " + args,
                                  &status);
  if (status != 0) throw std::runtime_error(script + " exited with status " + std::to_string(status));
  return out;
}

mdpo::ModelShape shape(int vocab, int dim, int context, int layers, int cond) {
  mdpo::ModelShape s;
  s.vocab_size = vocab;
  s.embed_dim = dim;
  s.context = context;
  s.layers = layers;
  s.cond_dim = cond;
  return s;
}

Tokens random_tokens(Rng& rng, int vocab, std::size_t n) {
  Tokens t(n);
  for (auto& x : t) x = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(vocab)));
  return t;
}

preference::MaskVector random_mask(Rng& rng, std::size_t n) {
  preference::MaskVector m(n);
  for (auto& b : m) b = rng.uniform() < 0.5;
  m[0] = 1;
  m[n - 1] = 0;
  return m;
}

preference::PreferenceTriplet random_triplet(Rng& rng, int vocab) {
  const std::size_t nw = 3 + rng.below(8), nl = 3 + rng.below(8);
  return {"c", {"w", random_tokens(rng, vocab, nw), random_mask(rng, nw)},
          {"l", random_tokens(rng, vocab, nl), random_mask(rng, nl)}};
}

mdpo::ConditionEmbedding random_cond(Rng& rng, int dim) {
  mdpo::ConditionEmbedding c;
  for (int i = 0; i < dim; ++i) c.values.push_back(rng.normal());
  return c;
}

Outcome bpt_round_trip() {
  Checker c;
  const auto t0 = Clock::now();
  for (int t = 0; t < 200; ++t) {
    const Mesh m = testing::random_canonical(7000 + t);
    c.expect(same_mesh(bpt::decode(bpt::encode(m)), m), "mesh " + std::to_string(t) + " differs");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, "took " + std::to_string(secs) + " s");
  if (c.out.pass) c.out.detail = "200 meshes in " + std::to_string(secs) + " s";
  return c.out;
}

Outcome compression() {
  Checker c;
  const Mesh fan = canonicalize(testing::closed_fan(5));
  const bpt::TokenSequence seq = bpt::encode(fan);
  c.expect(seq.size() == 13, std::to_string(seq.size()) + " tokens");
  c.expect(fan.faces.size() * 9 == 45, "face count");
  c.expect(bpt::compression_ratio(seq, fan) == 45.0 / 13.0, "ratio");
  if (c.out.pass) c.out.detail = "13 tokens, ratio 45/13";
  return c.out;
}

Outcome metric_oracles() {
  Checker c;
  c.expect(metrics::boundary_edge_ratio(testing::tetrahedron()) == 0.0, "tetrahedron BER");
  c.expect(metrics::boundary_edge_ratio(testing::triangle()) == 1.0, "triangle BER");
  c.expect(metrics::boundary_edge_ratio(testing::two_triangles()) == 0.8, "two triangles BER");
  const std::vector<Vec3> origin{{0, 0, 0}}, far{{3, 4, 0}};
  c.expect(metrics::hausdorff(origin, far) == 5.0, "HD {0},{3,4,0}");
  c.expect(metrics::hausdorff(far, origin) == 5.0, "HD symmetric");
  if (c.out.pass) c.out.detail = "BER 0/1/0.8, HD 5";
  return c.out;
}

Outcome preference_brute_force() {
  Checker c;
  Rng rng(21);
  const std::vector<Mesh> shapes{testing::triangle(), testing::quad_grid(2, 2),
                                 testing::tetrahedron(), testing::open_fan(4)};
  std::size_t total = 0;
  for (int t = 0; t < 100; ++t) {
    preference::CandidateSet set{"cond" + std::to_string(t), {}};
    for (int i = 0; i < 8; ++i) {
      metrics::QualityReport r;
      r.mesh_id = "m" + std::to_string(i);
      r.ber = rng.below(4) / 4.0;
      r.ts = rng.below(4) / 4.0;
      r.hd = rng.below(4) / 10.0;
      const Mesh m = canonicalize(shapes[rng.below(shapes.size())]);
      set.candidates.push_back({r.mesh_id, bpt::encode(m), r});
    }
    std::vector<std::pair<std::string, std::string>> want, got;
    for (const auto& a : set.candidates) {
      for (const auto& b : set.candidates) {
        if (a.report.ber < b.report.ber && a.report.ts > b.report.ts && a.report.hd < b.report.hd) {
          want.push_back({a.mesh_id, b.mesh_id});
        }
      }
    }
    for (const auto& p : preference::build_triplets(set).triplets) {
      got.push_back({p.winner.mesh_id, p.loser.mesh_id});
    }
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    c.expect(got == want, "set " + std::to_string(t));
    total += want.size();
  }
  if (c.out.pass) c.out.detail = "100 sets, " + std::to_string(total) + " triplets";
  return c.out;
}

Outcome mdpo_identity() {
  Checker c;
  Rng rng(4);
  const auto s = shape(12, 4, 16, 1, 3);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto ref = mdpo::ToyARModel::random(s, 100 + t, 0.5);
    const auto policy = ref;
    const auto triplet = random_triplet(rng, 12);
    for (double beta : {0.01, 0.1, 1.0}) {
      const double loss = mdpo::mdpo_loss(triplet, policy, ref, {beta, 1e-8}, random_cond(rng, 3));
      worst = std::max(worst, std::abs(loss - std::numbers::ln2));
    }
  }
  c.expect(worst <= 1e-9, "deviation " + std::to_string(worst));
  if (c.out.pass) {
    std::ostringstream d;
    d << "150 evaluations, max |loss - ln 2| = " << worst;
    c.out.detail = d.str();
  }
  return c.out;
}

Outcome mdpo_worked_case() {
  Checker c;
  const double pos = mdpo::masked_log_ratio_pos({{0.5, 0.5, 0.9}}, {{0.25, 0.25, 0.9}},
                                                std::vector<std::uint8_t>{1, 1, 0});
  const double neg = mdpo::masked_log_ratio_neg({{0.2, 0.3}}, {{0.4, 0.3}},
                                                std::vector<std::uint8_t>{0, 1});
  const double loss = mdpo::mdpo_loss_from_terms(pos, neg, 1.0);
  c.expect(std::abs(pos - std::numbers::ln2) <= 1e-12, "L+");
  c.expect(std::abs(neg + std::numbers::ln2) <= 1e-12, "L-");
  c.expect(std::abs(loss - std::log(1.25)) <= 1e-9, "loss " + std::to_string(loss));
  const json oracle = json::parse(python("mdpo_oracle.py", ""));
  c.expect(std::abs(loss - oracle["loss"].get<double>()) <= 1e-9, "oracle disagrees");
  c.expect(std::abs(pos - oracle["pos"].get<double>()) <= 1e-12, "oracle L+");
  c.expect(std::abs(neg - oracle["neg"].get<double>()) <= 1e-12, "oracle L-");
  if (c.out.pass) {
    std::ostringstream d;
    d.precision(9);
    d << "loss " << loss << ", oracle " << oracle["loss"].get<double>();
    c.out.detail = d.str();
  }
  return c.out;
}

template <typename LossFn>
double max_relative_error(mdpo::ToyARModel model, LossFn loss, const std::vector<double>& g) {
  const double h = 1e-5;
  double worst = 0.0;
  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = loss(model);
    params[i] = keep - h;
    const double down = loss(model);
    params[i] = keep;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max(std::abs(numeric), std::abs(g[i]));
    if (scale < 1e-10) continue;
    worst = std::max(worst, std::abs(numeric - g[i]) / scale);
  }
  return worst;
}

Outcome gradient_fidelity() {
  Checker c;
  const auto t0 = Clock::now();
  Rng rng(6);
  const std::vector<mdpo::ModelShape> shapes{shape(7, 4, 4, 2, 3), shape(10, 6, 6, 1, 4),
                                             shape(8, 5, 3, 3, 2), shape(12, 3, 16, 0, 5)};
  double worst_nll = 0.0, worst_mdpo = 0.0;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const auto& s = shapes[k];
    c.expect(mdpo::ToyARModel::parameter_count(s) <= 600, "model too large");
    const auto model = mdpo::ToyARModel::random(s, 40 + k, 0.5);
    const Tokens toks = random_tokens(rng, s.vocab_size, 9);
    const auto cond = random_cond(rng, s.cond_dim);
    const mdpo::NllObjective nll{toks, cond, 1e-8};
    worst_nll = std::max(worst_nll, max_relative_error(
                                        model,
                                        [&](const mdpo::ToyARModel& m) {
                                          return mdpo::nll_loss(m, toks, cond);
                                        },
                                        mdpo::grad(model, nll).grad));

    const auto reference = mdpo::ToyARModel::random(s, 60 + k, 0.5);
    const auto triplet = random_triplet(rng, s.vocab_size);
    const auto obj = mdpo::make_mdpo_objective(triplet, reference, {0.7, 1e-8}, cond);
    worst_mdpo = std::max(worst_mdpo, max_relative_error(
                                          model,
                                          [&](const mdpo::ToyARModel& m) {
                                            return mdpo::mdpo_terms(m, obj).loss;
                                          },
                                          mdpo::grad(model, obj).grad));
  }
  const double secs = seconds_since(t0);
  c.expect(worst_nll < 1e-4, "NLL relative error " + std::to_string(worst_nll));
  c.expect(worst_mdpo < 1e-4, "M-DPO relative error " + std::to_string(worst_mdpo));
  c.expect(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (c.out.pass) {
    std::ostringstream d;
    d << "max rel err NLL " << worst_nll << ", M-DPO " << worst_mdpo << ", " << secs << " s";
    c.out.detail = d.str();
  }
  return c.out;
}

Outcome training_signal() {
  Checker c;
  const auto corpus = mdpo::synthetic_corpus(20, 8, 8, 16, 7);
  c.expect(corpus.size() == 20, "corpus size");
  std::vector<mdpo::SequenceExample> data;
  for (const auto& seq : corpus) data.push_back({seq, mdpo::zero_condition(4)});
  mdpo::TrainState state{mdpo::ToyARModel::random(shape(8, 8, 32, 1, 4), 11, 0.1), 0};
  const std::span<const mdpo::SequenceExample> batch(data);
  const double initial = mdpo::evaluate_batch(state.model, batch).loss;
  for (int i = 0; i < 500; ++i) mdpo::train_step(state, batch, 0.05);
  const double final_loss = mdpo::evaluate_batch(state.model, batch).loss;
  c.expect(final_loss <= 0.7 * initial,
           "NLL " + std::to_string(initial) + " -> " + std::to_string(final_loss));

  // Winners are corpus sequences, losers are shuffled copies of them.
  Rng rng(12);
  const mdpo::ToyARModel reference = state.model;
  const mdpo::MDPOConfig cfg{0.1, 1e-8};
  std::vector<mdpo::TripletExample> triplets;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Tokens loser = corpus[i];
    std::shuffle(loser.begin(), loser.end(), rng.engine());
    preference::PreferenceTriplet t{"c",
                                    {"w" + std::to_string(i), corpus[i], random_mask(rng, corpus[i].size())},
                                    {"l" + std::to_string(i), loser, random_mask(rng, loser.size())}};
    triplets.emplace_back(std::move(t), reference, cfg, mdpo::zero_condition(4));
  }
  mdpo::TrainState policy{reference, 0};
  std::vector<double> margins;
  for (int i = 0; i < 200; ++i) {
    margins.push_back(
        mdpo::train_step(policy, std::span<const mdpo::TripletExample>(triplets), 0.05).margin);
  }
  const double first = std::accumulate(margins.begin(), margins.begin() + 20, 0.0) / 20;
  const double last = std::accumulate(margins.end() - 20, margins.end(), 0.0) / 20;
  c.expect(last > first, "margin " + std::to_string(first) + " -> " + std::to_string(last));
  if (c.out.pass) {
    std::ostringstream d;
    d << "NLL " << initial << " -> " << final_loss << "; margin " << first << " -> " << last;
    c.out.detail = d.str();
  }
  return c.out;
}

Outcome seam_codec() {
  Checker c;
  Rng rng(9);
  const QuantGrid grid;
  auto grid_point = [&] {
    return dequantize(Bins{static_cast<int>(rng.below(1024)), static_cast<int>(rng.below(1024)),
                           static_cast<int>(rng.below(1024))},
                      grid);
  };
  for (int t = 0; t < 100; ++t) {
    std::vector<seam::SeamSegment> segs(1 + rng.below(40));
    for (auto& s : segs) {
      do {
        s = {grid_point(), grid_point()};
      } while (s.head == s.tail);
    }
    const seam::SeamSequence seq = seam::order_seams(segs);
    const std::vector<int> toks = seam::encode_seam(seq);
    c.expect(toks.size() == 6 * seq.size(), "length");
    c.expect(seam::decode_seam(toks) == seq, "sequence " + std::to_string(t));
    c.expect(seam::encode_seam(seam::decode_seam(toks)) == toks, "tokens " + std::to_string(t));
  }
  Mesh m;
  m.vertices.assign(100, Vec3{});
  auto valid = [&](std::size_t n) {
    seam::SeamSequence s;
    s.segments.assign(n, seam::SeamSegment{{0, 0, 0}, {1, 0, 0}});
    return seam::seam_ratio(s, m).valid;
  };
  c.expect(valid(10) && valid(35) && valid(20), "band interior or edge rejected");
  c.expect(!valid(9) && !valid(36), "outside band accepted");
  if (c.out.pass) c.out.detail = "100 sequences exact; R band [0.1, 0.35] inclusive";
  return c.out;
}

Outcome structural_sampling() {
  Checker c;
  Mesh lone;
  lone.vertices = {{0, 0, 0}};
  const std::vector<std::pair<std::string, Mesh>> fixtures{
      {"triangle", testing::triangle()},         {"two_triangles", testing::two_triangles()},
      {"tetrahedron", testing::tetrahedron()},   {"fan", testing::closed_fan(5)},
      {"quad_grid", testing::quad_grid(6, 4)},   {"cylinder", testing::cylinder(12, 4)},
      {"big_grid", testing::tri_grid(150, 120)}, {"lone_vertex", lone}};
  for (const auto& [name, mesh] : fixtures) {
    const auto s = seam::sample_structural(mesh, 3);
    c.expect(s.vertex_points.size() == 30720 && s.edge_points.size() == 30720, name);
  }
  if (c.out.pass) c.out.detail = std::to_string(fixtures.size()) + " fixtures, 30720 + 30720 each";
  return c.out;
}

Outcome cutting_topology() {
  Checker c;
  const Mesh cyl = testing::cylinder(12, 4);
  const std::vector<uv::EdgePath> paths{uv::EdgeGraph(cyl).shortest_path(0, 48)};
  c.expect(paths[0] == uv::EdgePath{0, 12, 24, 36, 48}, "generator path");
  const Mesh cut = uv::cut_mesh(cyl, paths).mesh;
  const auto charts = uv::extract_charts(cut);
  c.expect(charts.size() == 1, "chart count");
  c.expect(uv::euler_characteristic(cut) == 1, "euler");
  c.expect(uv::boundary_loops(cut).size() == 1, "loops");
  c.expect(cut.faces.size() == cyl.faces.size(), "face count");
  c.expect(std::abs(surface_area(cut) - surface_area(cyl)) <= 1e-9, "area");

  const auto dir = std::filesystem::current_path() / "scratch" / "acceptance";
  std::filesystem::create_directories(dir);
  save_obj(cut, dir / "cut_cylinder.obj");
  const json stats = json::parse(python("topology_oracle.py", "stats '" + (dir / "cut_cylinder.obj").string() + "'"));
  c.expect(stats["euler"] == 1, "oracle euler");
  c.expect(stats["boundary_loops"] == 1, "oracle loops");
  c.expect(stats["components"] == 1, "oracle components");
  c.expect(stats["faces"].get<std::size_t>() == cyl.faces.size(), "oracle faces");
  c.expect(std::abs(stats["area"].get<double>() - surface_area(cyl)) <= 1e-9, "oracle area");
  if (c.out.pass) c.out.detail = "1 chart, euler 1, 1 loop (library and oracle)";
  return c.out;
}

Outcome distortion_metric() {
  Checker c;
  const Mesh grid = testing::tri_grid(6, 6);
  std::vector<Uv> identity;
  for (const Vec3& v : grid.vertices) identity.push_back({v.x, v.y});
  const double mean = uv::face_distortion(grid, identity).mean;
  c.expect(mean < 1e-6, "identity mean " + std::to_string(mean));
  const auto flat = uv::flatten_chart(uv::extract_charts(grid).at(0));
  const double flattened = uv::face_distortion(flat).mean;
  c.expect(flattened < 1e-6, "flattened planar mean " + std::to_string(flattened));
  const std::vector<Uv> stretched{{0, 0}, {2, 0}, {0, 1}};
  const double e = uv::face_distortion(testing::triangle(), stretched).mean;
  c.expect(std::abs(e - 0.5) <= 1e-9, "stretch energy " + std::to_string(e));
  if (c.out.pass) {
    std::ostringstream d;
    d << "identity " << mean << ", stretch " << e;
    c.out.detail = d.str();
  }
  return c.out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"bpt round trip", bpt_round_trip},
      {"compression fixture", compression},
      {"metric oracles", metric_oracles},
      {"preference brute force", preference_brute_force},
      {"m-dpo identity", mdpo_identity},
      {"m-dpo worked case", mdpo_worked_case},
      {"gradient fidelity", gradient_fidelity},
      {"training signal", training_signal},
      {"seam codec", seam_codec},
      {"structural sampling", structural_sampling},
      {"cutting topology", cutting_topology},
      {"distortion metric", distortion_metric},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures;
}
