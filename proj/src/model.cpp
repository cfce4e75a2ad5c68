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

#include "meshtopo/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "meshtopo/error.hpp"
#include "meshtopo/random.hpp"

namespace meshtopo::mdpo {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;
using ConstMap = Eigen::Map<const Matrix>;
using Map = Eigen::Map<Matrix>;

void ModelShape::validate() const {
  if (vocab_size < 1) fail(ErrorCode::kDomain, "vocab_size must be >= 1");
  if (embed_dim < 1) fail(ErrorCode::kDomain, "embed_dim must be >= 1");
  if (context < 1) fail(ErrorCode::kDomain, "context must be >= 1");
  if (layers < 0) fail(ErrorCode::kDomain, "layers must be >= 0");
  if (cond_dim < 1) fail(ErrorCode::kDomain, "cond_dim must be >= 1");
}

void MDPOConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) fail(ErrorCode::kDomain, "beta must be > 0");
  if (!(epsilon_prob > 0.0 && epsilon_prob <= 1e-3)) {
    fail(ErrorCode::kDomain, "epsilon_prob must lie in (0, 1e-3]");
  }
}

ConditionEmbedding zero_condition(int dim) {
  return {std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
}

ConditionEmbedding condition_from_cloud(const PointCloud& cloud, int dim, int resolution) {
  if (dim < 1 || resolution < 1) {
    fail(ErrorCode::kDomain, "condition dim and resolution must be >= 1");
  }
  if (cloud.points.empty()) fail(ErrorCode::kPrecondition, "condition cloud is empty");
  std::vector<std::uint64_t> cells;
  cells.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) {
    auto cell = [&](double c) {
      const double t = (std::clamp(c, -1.0, 1.0) + 1.0) * 0.5 * resolution;
      return std::min<std::uint64_t>(static_cast<std::uint64_t>(t),
                                     static_cast<std::uint64_t>(resolution - 1));
    };
    const auto r = static_cast<std::uint64_t>(resolution);
    cells.push_back((cell(p.x) * r + cell(p.y)) * r + cell(p.z));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  ConditionEmbedding out = zero_condition(dim);
  for (std::uint64_t c : cells) {
    // splitmix64 finalizer
    std::uint64_t h = c + 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h ^= h >> 31;
    out.values[h % static_cast<std::uint64_t>(dim)] += 1.0;
  }
  for (double& v : out.values) v /= static_cast<double>(cells.size());
  return out;
}

ToyARModel::ToyARModel(const ModelShape& shape) : shape_(shape) {
  shape_.validate();
  const auto v = static_cast<std::size_t>(shape.vocab_size);
  const auto d = static_cast<std::size_t>(shape.embed_dim);
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    segments_.push_back({std::move(name), offset, rows, cols});
    offset += rows * cols;
  };
  add("embedding", v, d);
  for (int l = 0; l < shape.layers; ++l) {
    const std::string p = "attn" + std::to_string(l) + ".";
    add(p + "query", d, d);
    add(p + "key", d, d);
    add(p + "value", d, d);
    add(p + "output", d, d);
  }
  add("output", v, d);
  add("condition", static_cast<std::size_t>(shape.cond_dim), d);
  params_.assign(offset, 0.0);
}

ToyARModel ToyARModel::random(const ModelShape& shape, std::uint64_t seed, double scale) {
  ToyARModel model(shape);
  Rng rng(seed);
  for (double& p : model.params_) p = scale * rng.normal();
  return model;
}

std::size_t ToyARModel::parameter_count(const ModelShape& s) {
  const auto v = static_cast<std::size_t>(s.vocab_size);
  const auto d = static_cast<std::size_t>(s.embed_dim);
  return 2 * v * d + 4 * static_cast<std::size_t>(s.layers) * d * d +
         static_cast<std::size_t>(s.cond_dim) * d;
}

const ToyARModel::Segment& ToyARModel::segment_info(std::string_view name) const {
  for (const Segment& s : segments_) {
    if (s.name == name) return s;
  }
  fail(ErrorCode::kInvalidArgument, "unknown parameter segment '" + std::string(name) + "'");
}

std::span<double> ToyARModel::segment(std::string_view name) {
  const Segment& s = segment_info(name);
  return std::span<double>(params_).subspan(s.offset, s.size());
}

std::span<const double> ToyARModel::segment(std::string_view name) const {
  const Segment& s = segment_info(name);
  return std::span<const double>(params_).subspan(s.offset, s.size());
}

const std::string& ToyARModel::segment_of(std::size_t index) const {
  for (const Segment& s : segments_) {
    if (index >= s.offset && index < s.offset + s.size()) return s.name;
  }
  fail(ErrorCode::kIndex, "parameter index " + std::to_string(index) + " out of range");
}

namespace {

struct LayerCache {
  Matrix input;  // n x d
  Matrix q, k, v;
  Matrix attn;  // n x n, zero outside the causal window
  Matrix mixed;  // attn * v
};

struct ForwardCache {
  std::vector<std::int32_t> inputs;  // -1 at position 0
  RowVector cond_proj;
  std::vector<LayerCache> layers;
  Matrix hidden;  // final n x d
  Matrix probs;   // n x vocab
};

ConstMap view(const ToyARModel& m, const std::string& name) {
  const auto& s = m.segment_info(name);
  return ConstMap(m.parameters().data() + s.offset, static_cast<Eigen::Index>(s.rows),
                  static_cast<Eigen::Index>(s.cols));
}

Map view(std::vector<double>& buf, const ToyARModel& m, const std::string& name) {
  const auto& s = m.segment_info(name);
  return Map(buf.data() + s.offset, static_cast<Eigen::Index>(s.rows),
             static_cast<Eigen::Index>(s.cols));
}

std::string layer_name(int l, const char* part) {
  return "attn" + std::to_string(l) + "." + part;
}

void softmax_rows(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).maxCoeff();
    m.row(i) = (m.row(i).array() - mx).exp();
    m.row(i) /= m.row(i).sum();
  }
}

void check_parameters(const ToyARModel& model) {
  for (const auto& s : model.segments()) {
    const auto seg = model.segment(s.name);
    if (!std::all_of(seg.begin(), seg.end(), [](double x) { return std::isfinite(x); })) {
      fail(ErrorCode::kNumeric, "non-finite parameter in segment '" + s.name + "'");
    }
  }
}

// `inputs[j]` is the token fed at position j (-1 for the condition-only
// start slot). Attention spans positions [j - window + 1, j].
ForwardCache run(const ToyARModel& model, std::vector<std::int32_t> inputs,
                 const ConditionEmbedding& cond, std::size_t window) {
  const ModelShape& shape = model.shape();
  if (cond.values.size() != static_cast<std::size_t>(shape.cond_dim)) {
    fail(ErrorCode::kDomain, "condition has " + std::to_string(cond.values.size()) +
                                 " values, model expects " +
                                 std::to_string(shape.cond_dim));
  }
  check_parameters(model);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  const Eigen::Index d = shape.embed_dim;
  ForwardCache cache;
  cache.inputs = std::move(inputs);

  const Eigen::Map<const RowVector> c(cond.values.data(), shape.cond_dim);
  cache.cond_proj = c * view(model, "condition");
  const ConstMap embedding = view(model, "embedding");
  Matrix h(n, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    h.row(j) = cache.cond_proj;
    if (cache.inputs[j] >= 0) h.row(j) += embedding.row(cache.inputs[j]);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const auto w = static_cast<Eigen::Index>(window);
  for (int l = 0; l < shape.layers; ++l) {
    LayerCache lc;
    lc.input = h;
    lc.q = h * view(model, layer_name(l, "query"));
    lc.k = h * view(model, layer_name(l, "key"));
    lc.v = h * view(model, layer_name(l, "value"));
    lc.attn = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - w + 1);
      const Eigen::Index len = i - lo + 1;
      RowVector s = (lc.k.middleRows(lo, len) * lc.q.row(i).transpose()).transpose() * scale;
      s = (s.array() - s.maxCoeff()).exp();
      lc.attn.row(i).segment(lo, len) = s / s.sum();
    }
    lc.mixed = lc.attn * lc.v;
    h = h + lc.mixed * view(model, layer_name(l, "output"));
    cache.layers.push_back(std::move(lc));
  }
  cache.hidden = h;
  cache.probs = h * view(model, "output").transpose();
  if (!cache.probs.allFinite()) {
    fail(ErrorCode::kNumeric, "non-finite logits in forward pass");
  }
  softmax_rows(cache.probs);
  return cache;
}

std::vector<std::int32_t> shifted_inputs(const ToyARModel& model,
                                         std::span<const std::int32_t> tokens) {
  std::vector<std::int32_t> inputs(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || tokens[i] >= model.shape().vocab_size) {
      fail(ErrorCode::kDomain, "token " + std::to_string(i) + " = " +
                                   std::to_string(tokens[i]) + " outside vocabulary of " +
                                   std::to_string(model.shape().vocab_size));
    }
    inputs[i] = i == 0 ? -1 : tokens[i - 1];
  }
  return inputs;
}

ForwardCache forward_cache(const ToyARModel& model, std::span<const std::int32_t> tokens,
                           const ConditionEmbedding& cond) {
  if (tokens.empty()) fail(ErrorCode::kPrecondition, "sequence must hold at least one token");
  return run(model, shifted_inputs(model, tokens), cond,
             static_cast<std::size_t>(model.shape().context));
}

// Accumulates into `grad` the gradient of a loss whose derivative with
// respect to the realized-token probability p_i (before flooring) is dp[i].
void backward(const ToyARModel& model, const ForwardCache& cache,
              std::span<const std::int32_t> tokens, std::span<const double> dp,
              const ConditionEmbedding& cond, std::vector<double>& grad) {
  const ModelShape& shape = model.shape();
  const auto n = static_cast<Eigen::Index>(tokens.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(shape.embed_dim));

  // d p_i / d logit_ik = p_i (delta_{k, x_i} - P_ik)
  Matrix dlogits = Matrix::Zero(n, shape.vocab_size);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dp[i] == 0.0) continue;
    const double p = cache.probs(i, tokens[i]);
    dlogits.row(i) = -dp[i] * p * cache.probs.row(i);
    dlogits(i, tokens[i]) += dp[i] * p;
  }
  view(grad, model, "output") += dlogits.transpose() * cache.hidden;
  Matrix dh = dlogits * view(model, "output");

  for (int l = shape.layers - 1; l >= 0; --l) {
    const LayerCache& lc = cache.layers[static_cast<std::size_t>(l)];
    const ConstMap wo = view(model, layer_name(l, "output"));
    view(grad, model, layer_name(l, "output")) += lc.mixed.transpose() * dh;
    const Matrix dmixed = dh * wo.transpose();
    const Matrix dattn = dmixed * lc.v.transpose();
    const Matrix dv = lc.attn.transpose() * dmixed;
    Matrix ds = lc.attn.cwiseProduct(dattn);
    const Eigen::VectorXd row_dot = ds.rowwise().sum();
    ds = ds - lc.attn.cwiseProduct(row_dot.replicate(1, n));
    ds *= scale;
    const Matrix dq = ds * lc.k;
    const Matrix dk = ds.transpose() * lc.q;
    view(grad, model, layer_name(l, "query")) += lc.input.transpose() * dq;
    view(grad, model, layer_name(l, "key")) += lc.input.transpose() * dk;
    view(grad, model, layer_name(l, "value")) += lc.input.transpose() * dv;
    dh += dq * view(model, layer_name(l, "query")).transpose() +
          dk * view(model, layer_name(l, "key")).transpose() +
          dv * view(model, layer_name(l, "value")).transpose();
  }

  Map dembed = view(grad, model, "embedding");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (cache.inputs[j] >= 0) dembed.row(cache.inputs[j]) += dh.row(j);
  }
  const RowVector dcond = dh.colwise().sum();
  const Eigen::Map<const Eigen::VectorXd> c(cond.values.data(), shape.cond_dim);
  view(grad, model, "condition") += c * dcond;
}

void check_gradient(const ToyARModel& model, const LossAndGrad& out) {
  if (!std::isfinite(out.loss)) fail(ErrorCode::kNumeric, "loss is not finite");
  for (const auto& s : model.segments()) {
    for (std::size_t i = s.offset; i < s.offset + s.size(); ++i) {
      if (!std::isfinite(out.grad[i])) {
        fail(ErrorCode::kNumeric, "non-finite gradient in segment '" + s.name + "'");
      }
    }
  }
}

TokenProbs realized(const ForwardCache& cache, std::span<const std::int32_t> tokens,
                    double epsilon_prob) {
  TokenProbs out;
  out.probs.resize(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.probs[i] = std::max(
        cache.probs(static_cast<Eigen::Index>(i), tokens[i]), epsilon_prob);
  }
  return out;
}

struct MaskedSum {
  double policy = 0.0;
  double ref = 0.0;
};

MaskedSum masked_sums(const TokenProbs& policy, const TokenProbs& ref,
                      std::span<const std::uint8_t> mask, bool complement,
                      const char* label) {
  if (policy.probs.size() != ref.probs.size() || policy.probs.size() != mask.size()) {
    fail(ErrorCode::kConsistency, std::string(label) +
                                      ": policy, reference and mask lengths differ");
  }
  MaskedSum s;
  std::size_t selected = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool on = complement ? mask[i] == 0 : mask[i] != 0;
    if (!on) continue;
    ++selected;
    s.policy += policy.probs[i];
    s.ref += ref.probs[i];
  }
  if (selected == 0) {
    fail(ErrorCode::kMaskEmpty,
         std::string(label) + (complement ? ": mask complement selects no token"
                                          : ": mask selects no token"));
  }
  return s;
}

}  // namespace

std::vector<std::vector<double>> forward_distributions(
    const ToyARModel& model, std::span<const std::int32_t> tokens,
    const ConditionEmbedding& cond) {
  const ForwardCache cache = forward_cache(model, tokens, cond);
  std::vector<std::vector<double>> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto row = cache.probs.row(static_cast<Eigen::Index>(i));
    out[i].assign(row.data(), row.data() + row.size());
  }
  return out;
}

TokenProbs forward(const ToyARModel& model, std::span<const std::int32_t> tokens,
                   const ConditionEmbedding& cond, double epsilon_prob) {
  return realized(forward_cache(model, tokens, cond), tokens, epsilon_prob);
}

double nll_loss(const ToyARModel& model, std::span<const std::int32_t> tokens,
                const ConditionEmbedding& cond, double epsilon_prob) {
  double loss = 0.0;
  for (double p : forward(model, tokens, cond, epsilon_prob).probs) loss -= std::log(p);
  return loss;
}

double masked_log_ratio_pos(const TokenProbs& policy, const TokenProbs& ref,
                            std::span<const std::uint8_t> mask) {
  const MaskedSum s = masked_sums(policy, ref, mask, false, "positive term");
  return std::log(s.policy / s.ref);
}

double masked_log_ratio_neg(const TokenProbs& policy, const TokenProbs& ref,
                            std::span<const std::uint8_t> mask) {
  const MaskedSum s = masked_sums(policy, ref, mask, true, "negative term");
  return std::log(s.policy / s.ref);
}

MdpoObjective make_mdpo_objective(const preference::PreferenceTriplet& triplet,
                                  const ToyARModel& reference, const MDPOConfig& cfg,
                                  const ConditionEmbedding& cond) {
  cfg.validate();
  MdpoObjective obj;
  obj.triplet = &triplet;
  obj.cfg = cfg;
  obj.cond = cond;
  obj.ref_winner = forward(reference, triplet.winner.tokens, cond, cfg.epsilon_prob);
  obj.ref_loser = forward(reference, triplet.loser.tokens, cond, cfg.epsilon_prob);
  return obj;
}

MdpoTerms mdpo_terms(const ToyARModel& policy, const MdpoObjective& obj) {
  const auto& t = *obj.triplet;
  MdpoTerms terms;
  try {
    terms.pos = masked_log_ratio_pos(
        forward(policy, t.winner.tokens, obj.cond, obj.cfg.epsilon_prob), obj.ref_winner,
        t.winner.mask);
  } catch (const Error& e) {
    rethrow_with_context(e, "winner '" + t.winner.mesh_id + "'");
  }
  try {
    terms.neg = masked_log_ratio_neg(
        forward(policy, t.loser.tokens, obj.cond, obj.cfg.epsilon_prob), obj.ref_loser,
        t.loser.mask);
  } catch (const Error& e) {
    rethrow_with_context(e, "loser '" + t.loser.mesh_id + "'");
  }
  terms.margin = obj.cfg.beta * (terms.pos - terms.neg);
  terms.loss = mdpo_loss_from_terms(terms.pos, terms.neg, obj.cfg.beta);
  return terms;
}

double mdpo_loss(const preference::PreferenceTriplet& triplet, const ToyARModel& policy,
                 const ToyARModel& reference, const MDPOConfig& cfg,
                 const ConditionEmbedding& cond) {
  return mdpo_terms(policy, make_mdpo_objective(triplet, reference, cfg, cond)).loss;
}

LossAndGrad grad(const ToyARModel& model, const NllObjective& obj) {
  const ForwardCache cache = forward_cache(model, obj.tokens, obj.cond);
  LossAndGrad out;
  out.grad.assign(model.parameters().size(), 0.0);
  std::vector<double> dp(obj.tokens.size(), 0.0);
  for (std::size_t i = 0; i < obj.tokens.size(); ++i) {
    const double p = cache.probs(static_cast<Eigen::Index>(i), obj.tokens[i]);
    if (p > obj.epsilon_prob) {
      out.loss -= std::log(p);
      dp[i] = -1.0 / p;
    } else {
      out.loss -= std::log(obj.epsilon_prob);
    }
  }
  backward(model, cache, obj.tokens, dp, obj.cond, out.grad);
  check_gradient(model, out);
  return out;
}

LossAndGrad grad(const ToyARModel& policy, const MdpoObjective& obj) {
  const auto& t = *obj.triplet;
  const double eps = obj.cfg.epsilon_prob;
  const ForwardCache win = forward_cache(policy, t.winner.tokens, obj.cond);
  const ForwardCache lose = forward_cache(policy, t.loser.tokens, obj.cond);
  const TokenProbs pw = realized(win, t.winner.tokens, eps);
  const TokenProbs pl = realized(lose, t.loser.tokens, eps);

  MaskedSum sw;
  MaskedSum sl;
  try {
    sw = masked_sums(pw, obj.ref_winner, t.winner.mask, false, "positive term");
  } catch (const Error& e) {
    rethrow_with_context(e, "winner '" + t.winner.mesh_id + "'");
  }
  try {
    sl = masked_sums(pl, obj.ref_loser, t.loser.mask, true, "negative term");
  } catch (const Error& e) {
    rethrow_with_context(e, "loser '" + t.loser.mesh_id + "'");
  }
  const double pos = std::log(sw.policy / sw.ref);
  const double neg = std::log(sl.policy / sl.ref);
  const double beta = obj.cfg.beta;
  const double z = beta * (pos - neg);

  LossAndGrad out;
  out.loss = -log_sigmoid(z);
  out.margin = z;
  out.grad.assign(policy.parameters().size(), 0.0);
  // d loss / d z = sigmoid(z) - 1 = -sigmoid(-z)
  const double dz = -std::exp(log_sigmoid(-z));

  std::vector<double> dp(t.winner.tokens.size(), 0.0);
  for (std::size_t i = 0; i < dp.size(); ++i) {
    const double raw = win.probs(static_cast<Eigen::Index>(i), t.winner.tokens[i]);
    if (t.winner.mask[i] != 0 && raw > eps) dp[i] = dz * beta / sw.policy;
  }
  backward(policy, win, t.winner.tokens, dp, obj.cond, out.grad);

  dp.assign(t.loser.tokens.size(), 0.0);
  for (std::size_t i = 0; i < dp.size(); ++i) {
    const double raw = lose.probs(static_cast<Eigen::Index>(i), t.loser.tokens[i]);
    if (t.loser.mask[i] == 0 && raw > eps) dp[i] = -dz * beta / sl.policy;
  }
  backward(policy, lose, t.loser.tokens, dp, obj.cond, out.grad);
  check_gradient(policy, out);
  return out;
}

std::vector<std::int32_t> generate(const ToyARModel& model, const ConditionEmbedding& cond,
                                   std::size_t max_tokens, std::size_t window,
                                   std::uint64_t seed,
                                   std::optional<std::int32_t> stop_token) {
  if (window < 1 || window > static_cast<std::size_t>(model.shape().context)) {
    fail(ErrorCode::kDomain, "window must lie in [1, context]");
  }
  Rng rng(seed);
  std::vector<std::int32_t> out;
  out.reserve(max_tokens);
  while (out.size() < max_tokens) {
    // Inputs for positions [n - window + 1, n], where position n predicts
    // token n.
    const std::size_t n = out.size();
    const std::size_t first = n + 1 >= window ? n + 1 - window : 0;
    std::vector<std::int32_t> inputs;
    for (std::size_t j = first; j <= n; ++j) inputs.push_back(j == 0 ? -1 : out[j - 1]);
    const ForwardCache cache = run(model, std::move(inputs), cond, window);
    const auto last = cache.probs.row(cache.probs.rows() - 1);
    const double u = rng.uniform();
    double acc = 0.0;
    std::int32_t pick = static_cast<std::int32_t>(last.size() - 1);
    for (Eigen::Index k = 0; k < last.size(); ++k) {
      acc += last(k);
      if (u < acc) {
        pick = static_cast<std::int32_t>(k);
        break;
      }
    }
    out.push_back(pick);
    if (stop_token && pick == *stop_token) break;
  }
  return out;
}

}  // namespace meshtopo::mdpo
