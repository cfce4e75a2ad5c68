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

#include "meshtopo/training.hpp"

#include <numeric>

#include "meshtopo/error.hpp"
#include "meshtopo/parallel.hpp"
#include "meshtopo/random.hpp"

namespace meshtopo::mdpo {

TripletExample::TripletExample(preference::PreferenceTriplet t,
                               const ToyARModel& reference, const MDPOConfig& cfg,
                               const ConditionEmbedding& cond)
    : triplet(std::move(t)), objective(make_mdpo_objective(triplet, reference, cfg, cond)) {}

TripletExample::TripletExample(const TripletExample& other)
    : triplet(other.triplet), objective(other.objective) {
  objective.triplet = &triplet;
}

TripletExample& TripletExample::operator=(const TripletExample& other) {
  triplet = other.triplet;
  objective = other.objective;
  objective.triplet = &triplet;
  return *this;
}

void gradient_descent_step(std::span<double> params, std::span<const double> grad,
                           double lr) {
  if (!(lr > 0.0)) fail(ErrorCode::kDomain, "learning rate must be > 0");
  if (params.size() != grad.size()) {
    fail(ErrorCode::kConsistency, "gradient length does not match parameter count");
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

namespace {

template <typename Example, typename MakeGrad>
StepResult step_impl(TrainState& state, std::span<const Example> batch, double lr,
                     unsigned threads, MakeGrad make_grad) {
  if (!(lr > 0.0)) fail(ErrorCode::kDomain, "learning rate must be > 0");
  if (batch.empty()) fail(ErrorCode::kPrecondition, "empty training batch");
  std::vector<LossAndGrad> parts(batch.size());
  parallel_for(batch.size(), threads,
               [&](std::size_t i) { parts[i] = make_grad(state.model, batch[i]); });

  const double inv = 1.0 / static_cast<double>(batch.size());
  std::vector<double> total(state.model.parameters().size(), 0.0);
  StepResult result;
  for (const LossAndGrad& p : parts) {
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += p.grad[k] * inv;
    result.loss += p.loss * inv;
    result.margin += p.margin * inv;
  }
  gradient_descent_step(state.model.parameters(), total, lr);
  ++state.step;
  return result;
}

}  // namespace

StepResult train_step(TrainState& state, std::span<const SequenceExample> batch,
                      double lr, unsigned threads) {
  return step_impl(state, batch, lr, threads,
                   [](const ToyARModel& m, const SequenceExample& ex) {
                     return grad(m, NllObjective{ex.tokens, ex.cond});
                   });
}

StepResult train_step(TrainState& state, std::span<const TripletExample> batch,
                      double lr, unsigned threads) {
  return step_impl(state, batch, lr, threads,
                   [](const ToyARModel& m, const TripletExample& ex) {
                     return grad(m, ex.objective);
                   });
}

StepResult evaluate_batch(const ToyARModel& model, std::span<const SequenceExample> data) {
  StepResult r;
  for (const SequenceExample& ex : data) r.loss += nll_loss(model, ex.tokens, ex.cond);
  if (!data.empty()) r.loss /= static_cast<double>(data.size());
  return r;
}

StepResult evaluate_batch(const ToyARModel& model, std::span<const TripletExample> data) {
  StepResult r;
  for (const TripletExample& ex : data) {
    const MdpoTerms t = mdpo_terms(model, ex.objective);
    r.loss += t.loss;
    r.margin += t.margin;
  }
  if (!data.empty()) {
    r.loss /= static_cast<double>(data.size());
    r.margin /= static_cast<double>(data.size());
  }
  return r;
}

std::vector<std::vector<std::int32_t>> synthetic_corpus(std::size_t count, int vocab,
                                                        std::size_t min_len,
                                                        std::size_t max_len,
                                                        std::uint64_t seed) {
  if (vocab < 2) fail(ErrorCode::kDomain, "corpus vocabulary must hold >= 2 tokens");
  if (min_len < 1 || max_len < min_len) fail(ErrorCode::kDomain, "invalid length range");
  Rng rng(seed);
  // A random cyclic permutation as the successor table.
  std::vector<std::int32_t> cycle(static_cast<std::size_t>(vocab));
  std::iota(cycle.begin(), cycle.end(), 0);
  for (std::size_t i = cycle.size() - 1; i > 0; --i) {
    std::swap(cycle[i], cycle[rng.below(i + 1)]);
  }
  std::vector<std::int32_t> next(cycle.size());
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    next[static_cast<std::size_t>(cycle[i])] = cycle[(i + 1) % cycle.size()];
  }
  std::vector<std::vector<std::int32_t>> corpus(count);
  for (auto& seq : corpus) {
    const std::size_t len = min_len + rng.below(max_len - min_len + 1);
    std::int32_t t = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(vocab)));
    for (std::size_t i = 0; i < len; ++i) {
      seq.push_back(t);
      t = next[static_cast<std::size_t>(t)];
    }
  }
  return corpus;
}

}  // namespace meshtopo::mdpo
