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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meshtopo/mesh.hpp"
#include "meshtopo/preference.hpp"

namespace meshtopo::mdpo {

struct ModelShape {
  int vocab_size = 0;
  int embed_dim = 16;
  int context = 64;
  int layers = 1;
  int cond_dim = 8;

  void validate() const;
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// Fixed-length point-cloud summary fed to every position of the model.
struct ConditionEmbedding {
  std::vector<double> values;
};

ConditionEmbedding zero_condition(int dim);

// Voxelizes [-1, 1]^3 at `resolution` cells per axis, hashes every occupied
// cell into `dim` buckets and returns the normalized bucket histogram.
ConditionEmbedding condition_from_cloud(const PointCloud& cloud, int dim = 8,
                                        int resolution = 8);

// Single-stack causal self-attention scorer over token sequences.
//
// Position 0 sees only the condition; position i > 0 sees token i-1. Each
// position attends to itself and the `context - 1` positions before it, so
// the prediction for token i depends on tokens < i only. There is no
// positional encoding. Parameters live in one flat buffer split into named
// row-major segments:
//
//   embedding        vocab x dim
//   attn<l>.query    dim x dim     (likewise .key, .value, .output)
//   output           vocab x dim
//   condition        cond_dim x dim
class ToyARModel {
 public:
  struct Segment {
    std::string name;
    std::size_t offset;
    std::size_t rows;
    std::size_t cols;
    std::size_t size() const { return rows * cols; }
  };

  // All parameters zero.
  explicit ToyARModel(const ModelShape& shape);
  // Normal(0, scale^2) parameters.
  static ToyARModel random(const ModelShape& shape, std::uint64_t seed,
                           double scale = 0.1);

  static std::size_t parameter_count(const ModelShape& shape);

  const ModelShape& shape() const { return shape_; }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment_info(std::string_view name) const;
  std::span<double> segment(std::string_view name);
  std::span<const double> segment(std::string_view name) const;

  // Name of the segment holding parameter `index`.
  const std::string& segment_of(std::size_t index) const;

 private:
  ModelShape shape_;
  std::vector<Segment> segments_;
  std::vector<double> params_;
};

struct MDPOConfig {
  double beta = 0.1;
  double epsilon_prob = 1e-8;

  void validate() const;
};

// Probabilities of the realized tokens, floored at epsilon_prob.
struct TokenProbs {
  std::vector<double> probs;
};

// Full next-token distributions (rows) before flooring.
std::vector<std::vector<double>> forward_distributions(
    const ToyARModel& model, std::span<const std::int32_t> tokens,
    const ConditionEmbedding& cond);

TokenProbs forward(const ToyARModel& model, std::span<const std::int32_t> tokens,
                   const ConditionEmbedding& cond, double epsilon_prob = 1e-8);

// -sum_i log p_i.
double nll_loss(const ToyARModel& model, std::span<const std::int32_t> tokens,
                const ConditionEmbedding& cond, double epsilon_prob = 1e-8);

// log(|policy * mask|_1 / |ref * mask|_1); kMaskEmpty when nothing is selected.
double masked_log_ratio_pos(const TokenProbs& policy, const TokenProbs& ref,
                            std::span<const std::uint8_t> mask);
// Same over the complement (1 - mask).
double masked_log_ratio_neg(const TokenProbs& policy, const TokenProbs& ref,
                            std::span<const std::uint8_t> mask);

inline double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

// -log sigmoid(beta * pos - beta * neg).
inline double mdpo_loss_from_terms(double pos, double neg, double beta) {
  return -log_sigmoid(beta * (pos - neg));
}

struct MdpoTerms {
  double pos = 0.0;     // L+ on the winner
  double neg = 0.0;     // L- on the loser
  double margin = 0.0;  // beta * (pos - neg)
  double loss = 0.0;
};

// Reference probabilities are fixed inputs; the reference model is frozen
// and never differentiated.
struct MdpoObjective {
  const preference::PreferenceTriplet* triplet = nullptr;
  TokenProbs ref_winner;
  TokenProbs ref_loser;
  MDPOConfig cfg;
  ConditionEmbedding cond;
};

MdpoObjective make_mdpo_objective(const preference::PreferenceTriplet& triplet,
                                  const ToyARModel& reference, const MDPOConfig& cfg,
                                  const ConditionEmbedding& cond);

MdpoTerms mdpo_terms(const ToyARModel& policy, const MdpoObjective& objective);

double mdpo_loss(const preference::PreferenceTriplet& triplet, const ToyARModel& policy,
                 const ToyARModel& reference, const MDPOConfig& cfg,
                 const ConditionEmbedding& cond);

struct NllObjective {
  std::span<const std::int32_t> tokens;
  ConditionEmbedding cond;
  double epsilon_prob = 1e-8;
};

struct LossAndGrad {
  double loss = 0.0;
  double margin = 0.0;  // M-DPO only
  std::vector<double> grad;  // one entry per model parameter
};

// Exact reverse-mode gradients. Throws kNumeric naming the segment when a
// gradient or the loss is not finite.
LossAndGrad grad(const ToyARModel& model, const NllObjective& objective);
LossAndGrad grad(const ToyARModel& policy, const MdpoObjective& objective);

// Samples up to `max_tokens` tokens, conditioning each step on the last
// `window` positions only. Stops early after emitting `stop_token`.
std::vector<std::int32_t> generate(const ToyARModel& model,
                                   const ConditionEmbedding& cond,
                                   std::size_t max_tokens, std::size_t window,
                                   std::uint64_t seed,
                                   std::optional<std::int32_t> stop_token = std::nullopt);

}  // namespace meshtopo::mdpo
