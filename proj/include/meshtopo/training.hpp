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
#include <vector>

#include "meshtopo/model.hpp"

namespace meshtopo::mdpo {

struct SequenceExample {
  std::vector<std::int32_t> tokens;
  ConditionEmbedding cond;
};

// A triplet together with its frozen reference probabilities.
struct TripletExample {
  preference::PreferenceTriplet triplet;
  MdpoObjective objective;  // points at `triplet`; rebuilt on copy

  TripletExample(preference::PreferenceTriplet t, const ToyARModel& reference,
                 const MDPOConfig& cfg, const ConditionEmbedding& cond);
  TripletExample(const TripletExample& other);
  TripletExample& operator=(const TripletExample& other);
};

struct TrainState {
  ToyARModel model;
  std::size_t step = 0;
};

struct StepResult {
  double loss = 0.0;    // batch mean
  double margin = 0.0;  // batch mean of beta * (L+ - L-); 0 for NLL
};

// params -= lr * grad
void gradient_descent_step(std::span<double> params, std::span<const double> grad,
                           double lr);

// Mean-loss gradient over the batch, then one gradient-descent update.
// Per-example gradients run on up to `threads` workers and are summed in
// batch order, so the result does not depend on the thread count.
StepResult train_step(TrainState& state, std::span<const SequenceExample> batch,
                      double lr, unsigned threads = 1);
StepResult train_step(TrainState& state, std::span<const TripletExample> batch,
                      double lr, unsigned threads = 1);

// Mean loss/margin of the current model over a data set, without updating.
StepResult evaluate_batch(const ToyARModel& model, std::span<const SequenceExample> data);
StepResult evaluate_batch(const ToyARModel& model, std::span<const TripletExample> data);

// `count` sequences over `vocab` tokens following one fixed successor table
// from random starts; lengths in [min_len, max_len].
std::vector<std::vector<std::int32_t>> synthetic_corpus(std::size_t count, int vocab,
                                                        std::size_t min_len,
                                                        std::size_t max_len,
                                                        std::uint64_t seed);

}  // namespace meshtopo::mdpo
