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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "meshtopo/error.hpp"
#include "meshtopo/model.hpp"
#include "meshtopo/random.hpp"
#include "meshtopo/training.hpp"

namespace meshtopo::mdpo {
namespace {

using Tokens = std::vector<std::int32_t>;
const double kLn2 = std::numbers::ln2;

ModelShape shape(int vocab, int dim, int context, int layers, int cond) {
  ModelShape s;
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

ConditionEmbedding random_cond(Rng& rng, int dim) {
  ConditionEmbedding c;
  for (int i = 0; i < dim; ++i) c.values.push_back(rng.normal());
  return c;
}

// Mask with at least one 1 and one 0.
preference::MaskVector random_mask(Rng& rng, std::size_t n) {
  preference::MaskVector m(n);
  for (auto& b : m) b = rng.uniform() < 0.5;
  m[0] = 1;
  m[n - 1] = 0;
  return m;
}

preference::PreferenceTriplet random_triplet(Rng& rng, int vocab) {
  preference::PreferenceTriplet t;
  t.condition_id = "c";
  const std::size_t nw = 3 + rng.below(8), nl = 3 + rng.below(8);
  t.winner = {"w", random_tokens(rng, vocab, nw), random_mask(rng, nw)};
  t.loser = {"l", random_tokens(rng, vocab, nl), random_mask(rng, nl)};
  return t;
}

TEST(Model, ParameterArithmetic) {
  const ModelShape s = shape(11, 4, 8, 2, 3);
  EXPECT_EQ(ToyARModel::parameter_count(s), 11u * 4 + 2u * 4 * 16 + 11u * 4 + 3u * 4);
  const ToyARModel m(s);
  EXPECT_EQ(m.parameters().size(), ToyARModel::parameter_count(s));
  std::size_t total = 0;
  for (const auto& seg : m.segments()) total += seg.size();
  EXPECT_EQ(total, m.parameters().size());
  EXPECT_EQ(m.segment("attn1.key").size(), 16u);
  EXPECT_THROW(ToyARModel(shape(0, 4, 8, 1, 3)), Error);
}

TEST(Forward, ZeroModelIsUniform) {
  const ToyARModel m(shape(9, 4, 8, 1, 2));
  const Tokens toks{1, 5, 8, 0};
  const TokenProbs p = forward(m, toks, zero_condition(2));
  ASSERT_EQ(p.probs.size(), 4u);
  for (double x : p.probs) EXPECT_NEAR(x, 1.0 / 9, 1e-15);
  EXPECT_NEAR(nll_loss(m, toks, zero_condition(2)), 4 * std::log(9.0), 1e-12);
}

TEST(Forward, SingleTokenVocabularyHasZeroLoss) {
  const ToyARModel m = ToyARModel::random(shape(1, 3, 4, 1, 2), 3, 0.5);
  EXPECT_NEAR(nll_loss(m, Tokens{0}, zero_condition(2)), 0.0, 1e-15);
}

TEST(Forward, HandSetDistribution) {
  // Same weights as tests/oracles/mdpo_oracle.py; value frozen from it.
  ToyARModel m(shape(3, 2, 64, 0, 1));
  const std::vector<double> e{1, 0, 0, 1, 0.5, -0.5}, w{2, 0, 0, 2, 1, 1}, c{0.1, -0.2};
  std::copy(e.begin(), e.end(), m.segment("embedding").begin());
  std::copy(w.begin(), w.end(), m.segment("output").begin());
  std::copy(c.begin(), c.end(), m.segment("condition").begin());
  EXPECT_NEAR(nll_loss(m, Tokens{0, 1, 2, 1, 0, 2, 2}, ConditionEmbedding{{1.0}}),
              13.030756420409153, 1e-12);
}

TEST(Forward, DistributionsSumToOne) {
  Rng rng(1);
  const ToyARModel m = ToyARModel::random(shape(13, 6, 5, 2, 4), 2, 1.0);
  const auto dists = forward_distributions(m, random_tokens(rng, 13, 12), random_cond(rng, 4));
  ASSERT_EQ(dists.size(), 12u);
  for (const auto& d : dists) {
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(Forward, PropertyCausal) {
  Rng rng(2);
  const ToyARModel m = ToyARModel::random(shape(10, 5, 16, 2, 3), 5, 0.8);
  for (int t = 0; t < 50; ++t) {
    const ConditionEmbedding cond = random_cond(rng, 3);
    Tokens a = random_tokens(rng, 10, 12);
    const std::size_t cut = rng.below(a.size());
    Tokens b = a;
    for (std::size_t i = cut; i < b.size(); ++i) b[i] = static_cast<std::int32_t>(rng.below(10));
    const TokenProbs pa = forward(m, a, cond), pb = forward(m, b, cond);
    // Position i sees tokens before i only.
    for (std::size_t i = 0; i <= cut; ++i) {
      if (i < cut) EXPECT_EQ(pa.probs[i], pb.probs[i]);
      const auto da = forward_distributions(m, a, cond), db = forward_distributions(m, b, cond);
      EXPECT_EQ(da[i], db[i]);
    }
  }
}

TEST(Forward, Errors) {
  const ToyARModel m(shape(4, 2, 4, 1, 2));
  EXPECT_THROW(forward(m, Tokens{1, 4}, zero_condition(2)), Error);
  EXPECT_THROW(forward(m, Tokens{1}, zero_condition(3)), Error);
  ToyARModel bad = m;
  bad.segment("attn0.value")[1] = std::nan("");
  try {
    forward(bad, Tokens{1}, zero_condition(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
    EXPECT_NE(std::string(e.what()).find("attn0.value"), std::string::npos) << e.what();
  }
}

TEST(Condition, CloudSummaryIsDeterministic) {
  PointCloud cloud;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) cloud.points.push_back({rng.uniform(), rng.uniform(), 0});
  const ConditionEmbedding a = condition_from_cloud(cloud, 8);
  EXPECT_EQ(a.values.size(), 8u);
  EXPECT_EQ(a.values, condition_from_cloud(cloud, 8).values);
  PointCloud other;
  other.points = {{-0.9, -0.9, -0.9}};
  EXPECT_NE(a.values, condition_from_cloud(other, 8).values);
}

TEST(MaskedRatio, Examples) {
  const TokenProbs policy{{0.5, 0.5, 0.9}}, ref{{0.25, 0.25, 0.9}};
  const std::vector<std::uint8_t> mask{1, 1, 0};
  EXPECT_NEAR(masked_log_ratio_pos(policy, ref, mask), kLn2, 1e-15);
  EXPECT_EQ(masked_log_ratio_pos(policy, policy, mask), 0.0);

  const TokenProbs lp{{0.2, 0.3}}, lr{{0.4, 0.3}};
  const std::vector<std::uint8_t> lmask{0, 1};
  EXPECT_NEAR(masked_log_ratio_neg(lp, lr, lmask), -kLn2, 1e-15);
  EXPECT_EQ(masked_log_ratio_neg(lp, lp, lmask), 0.0);

  const std::vector<std::uint8_t> zeros{0, 0, 0}, ones{1, 1};
  try {
    masked_log_ratio_pos(policy, ref, zeros);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMaskEmpty);
  }
  try {
    masked_log_ratio_neg(lp, lr, ones);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMaskEmpty);
  }
  EXPECT_THROW(masked_log_ratio_pos(policy, lp, mask), Error);
}

TEST(MdpoLoss, WorkedCase) {
  const double pos = masked_log_ratio_pos({{0.5, 0.5, 0.9}}, {{0.25, 0.25, 0.9}},
                                          std::vector<std::uint8_t>{1, 1, 0});
  const double neg = masked_log_ratio_neg({{0.2, 0.3}}, {{0.4, 0.3}},
                                          std::vector<std::uint8_t>{0, 1});
  EXPECT_NEAR(mdpo_loss_from_terms(pos, neg, 1.0), std::log(1.25), 1e-12);
  // Frozen from tests/oracles/mdpo_oracle.py.
  EXPECT_NEAR(mdpo_loss_from_terms(pos, neg, 1.0), 0.2231435513142097, 1e-12);
}

TEST(MdpoLoss, SmallBetaTendsToLn2) {
  for (double beta : {1e-3, 1e-6, 1e-9}) {
    EXPECT_NEAR(mdpo_loss_from_terms(kLn2, -kLn2, beta), kLn2, 2 * beta);
    EXPECT_NEAR(mdpo_loss_from_terms(-kLn2, kLn2, beta), kLn2, 2 * beta);
    EXPECT_LT(mdpo_loss_from_terms(kLn2, -kLn2, beta), kLn2);
    EXPECT_GT(mdpo_loss_from_terms(-kLn2, kLn2, beta), kLn2);
  }
}

TEST(MdpoLoss, PropertyIdentityIsLn2) {
  Rng rng(4);
  const ModelShape s = shape(12, 4, 16, 1, 3);
  for (int t = 0; t < 50; ++t) {
    const ToyARModel ref = ToyARModel::random(s, 100 + t, 0.5);
    const ToyARModel policy = ref;
    const auto triplet = random_triplet(rng, 12);
    for (double beta : {0.01, 0.1, 1.0}) {
      const double loss = mdpo_loss(triplet, policy, ref, {beta, 1e-8}, random_cond(rng, 3));
      EXPECT_NEAR(loss, kLn2, 1e-9);
    }
  }
}

TEST(MdpoLoss, PropertyMonotoneInTerms) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(6);
    TokenProbs policy, ref;
    for (std::size_t i = 0; i < n; ++i) {
      policy.probs.push_back(0.05 + 0.9 * rng.uniform());
      ref.probs.push_back(0.05 + 0.9 * rng.uniform());
    }
    const auto mask = random_mask(rng, n);
    const double beta = 0.1 + rng.uniform();
    const double pos = masked_log_ratio_pos(policy, ref, mask);
    const double neg = masked_log_ratio_neg(policy, ref, mask);
    const double base = mdpo_loss_from_terms(pos, neg, beta);
    // Raising a selected winner probability raises L+ and lowers the loss.
    TokenProbs up = policy;
    up.probs[0] *= 1.05;
    const double pos_up = masked_log_ratio_pos(up, ref, mask);
    EXPECT_GT(pos_up, pos);
    EXPECT_LT(mdpo_loss_from_terms(pos_up, neg, beta), base);
    // Raising an unselected loser probability raises L- and the loss.
    TokenProbs loser = policy;
    loser.probs[n - 1] *= 1.05;
    const double neg2 = masked_log_ratio_neg(loser, ref, mask);
    EXPECT_GT(neg2, neg);
    EXPECT_GT(mdpo_loss_from_terms(pos, neg2, beta), base);
  }
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|) over the
// parameters; pairs that are both below 1e-10 count as agreeing.
template <typename LossFn, typename GradFn>
double max_relative_error(ToyARModel model, LossFn loss, GradFn analytic) {
  const std::vector<double> g = analytic(model);
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

const std::vector<ModelShape> kGradShapes{shape(7, 4, 4, 2, 3), shape(10, 6, 6, 1, 4),
                                          shape(8, 5, 3, 3, 2), shape(12, 3, 16, 0, 5)};

TEST(Gradient, NllMatchesFiniteDifferences) {
  Rng rng(6);
  for (std::size_t k = 0; k < kGradShapes.size(); ++k) {
    const ModelShape& s = kGradShapes[k];
    ASSERT_LE(ToyARModel::parameter_count(s), 600u);
    const ToyARModel model = ToyARModel::random(s, 40 + k, 0.5);
    const Tokens toks = random_tokens(rng, s.vocab_size, 9);
    const ConditionEmbedding cond = random_cond(rng, s.cond_dim);
    const NllObjective obj{toks, cond, 1e-8};
    const double err = max_relative_error(
        model, [&](const ToyARModel& m) { return nll_loss(m, toks, cond); },
        [&](const ToyARModel& m) { return grad(m, obj).grad; });
    EXPECT_LT(err, 1e-4) << "shape " << k;
  }
}

TEST(Gradient, MdpoMatchesFiniteDifferences) {
  Rng rng(7);
  for (std::size_t k = 0; k < kGradShapes.size(); ++k) {
    const ModelShape& s = kGradShapes[k];
    const ToyARModel policy = ToyARModel::random(s, 50 + k, 0.5);
    const ToyARModel reference = ToyARModel::random(s, 60 + k, 0.5);
    const auto triplet = random_triplet(rng, s.vocab_size);
    const ConditionEmbedding cond = random_cond(rng, s.cond_dim);
    const MdpoObjective obj = make_mdpo_objective(triplet, reference, {0.7, 1e-8}, cond);
    const double err = max_relative_error(
        policy, [&](const ToyARModel& m) { return mdpo_terms(m, obj).loss; },
        [&](const ToyARModel& m) { return grad(m, obj).grad; });
    EXPECT_LT(err, 1e-4) << "shape " << k;
  }
}

TEST(Gradient, UnusedParametersHaveZeroGradient) {
  const ModelShape s = shape(6, 3, 8, 1, 2);
  const ToyARModel model = ToyARModel::random(s, 8, 0.5);
  // Token 5 is never an input and the condition is zero.
  const Tokens toks{1, 2, 3, 5};
  const LossAndGrad g = grad(model, NllObjective{toks, zero_condition(2), 1e-8});
  const auto& emb = model.segment_info("embedding");
  for (std::size_t c = 0; c < emb.cols; ++c) EXPECT_EQ(g.grad[emb.offset + 5 * emb.cols + c], 0.0);
  const auto& cond = model.segment_info("condition");
  for (std::size_t i = 0; i < cond.size(); ++i) EXPECT_EQ(g.grad[cond.offset + i], 0.0);
}

TEST(Gradient, ReferenceStaysFrozen) {
  Rng rng(9);
  const ModelShape s = shape(8, 4, 8, 1, 2);
  const ToyARModel reference = ToyARModel::random(s, 1, 0.5);
  const ToyARModel snapshot = reference;
  std::vector<TripletExample> batch;
  for (int i = 0; i < 4; ++i) batch.emplace_back(random_triplet(rng, 8), reference, MDPOConfig{}, zero_condition(2));
  TrainState state{reference, 0};
  const StepResult first = train_step(state, std::span<const TripletExample>(batch), 0.1);
  EXPECT_NEAR(first.loss, kLn2, 1e-12);
  EXPECT_NEAR(first.margin, 0.0, 1e-12);
  EXPECT_EQ(state.step, 1u);
  const auto a = reference.parameters(), b = snapshot.parameters();
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  EXPECT_FALSE(std::equal(a.begin(), a.end(), state.model.parameters().begin()));
}

TEST(Training, QuadraticSurrogateHalvesDistance) {
  // f(x) = (x - 3)^2 / 2, gradient x - 3.
  std::vector<double> x{7.0};
  const std::vector<double> g{x[0] - 3.0};
  gradient_descent_step(x, g, 0.5);
  EXPECT_DOUBLE_EQ(x[0], 5.0);
  EXPECT_THROW(gradient_descent_step(x, g, 0.0), Error);
}

TEST(Training, RepeatingCorpusIsLearned) {
  const ModelShape s = shape(2, 8, 16, 1, 2);
  TrainState state{ToyARModel::random(s, 3, 0.1), 0};
  std::vector<SequenceExample> data{{Tokens{0, 1, 0, 1, 0, 1, 0, 1, 0, 1}, zero_condition(2)},
                                    {Tokens{1, 0, 1, 0, 1, 0, 1, 0, 1, 0}, zero_condition(2)}};
  for (int i = 0; i < 300; ++i) train_step(state, std::span<const SequenceExample>(data), 0.1);
  const TokenProbs p = forward(state.model, data[0].tokens, zero_condition(2));
  for (std::size_t i = 1; i < p.probs.size(); ++i) EXPECT_GT(p.probs[i], 0.9) << i;

  const Tokens out = generate(state.model, zero_condition(2), 24, 16, 5);
  ASSERT_EQ(out.size(), 24u);
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_NE(out[i], out[i - 1]) << i;
}

TEST(Training, NllDropsOnSyntheticCorpus) {
  const auto corpus = synthetic_corpus(20, 8, 8, 16, 7);
  ASSERT_EQ(corpus.size(), 20u);
  std::vector<SequenceExample> data;
  for (const auto& seq : corpus) data.push_back({seq, zero_condition(4)});
  TrainState state{ToyARModel::random(shape(8, 8, 32, 1, 4), 11, 0.1), 0};
  const double initial = evaluate_batch(state.model, std::span<const SequenceExample>(data)).loss;
  for (int i = 0; i < 200; ++i) train_step(state, std::span<const SequenceExample>(data), 0.05);
  const double final_loss = evaluate_batch(state.model, std::span<const SequenceExample>(data)).loss;
  EXPECT_LT(final_loss, 0.7 * initial);
}

TEST(Training, ThreadCountDoesNotChangeTheResult) {
  const auto corpus = synthetic_corpus(6, 5, 4, 9, 2);
  std::vector<SequenceExample> data;
  for (const auto& seq : corpus) data.push_back({seq, zero_condition(2)});
  const ToyARModel init = ToyARModel::random(shape(5, 4, 8, 1, 2), 4, 0.3);
  TrainState a{init, 0}, b{init, 0};
  for (int i = 0; i < 5; ++i) {
    train_step(a, std::span<const SequenceExample>(data), 0.1, 1);
    train_step(b, std::span<const SequenceExample>(data), 0.1, 3);
  }
  const auto pa = a.model.parameters(), pb = b.model.parameters();
  EXPECT_TRUE(std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()));
}

TEST(Generate, Basics) {
  const ToyARModel m = ToyARModel::random(shape(6, 4, 8, 1, 2), 9, 1.0);
  EXPECT_TRUE(generate(m, zero_condition(2), 0, 8, 1).empty());
  const Tokens a = generate(m, zero_condition(2), 40, 8, 1);
  EXPECT_EQ(a, generate(m, zero_condition(2), 40, 8, 1));
  EXPECT_EQ(a.size(), 40u);
  for (auto t : a) EXPECT_LT(t, 6);
  const Tokens stopped = generate(m, zero_condition(2), 200, 8, 1, a[5]);
  ASSERT_FALSE(stopped.empty());
  EXPECT_EQ(stopped.back(), a[5]);
  EXPECT_LE(stopped.size(), 6u);
  EXPECT_THROW(generate(m, zero_condition(2), 4, 9, 1), Error);
}

}  // namespace
}  // namespace meshtopo::mdpo
