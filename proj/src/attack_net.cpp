// Copyright 2026 The tabmia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tabmia/attack_net.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "tabmia/checkpoint.hpp"
#include "tabmia/errors.hpp"
#include "tabmia/mlp.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

namespace {

constexpr double kNormEps = 1e-5;
constexpr double kRunningMomentum = 0.1;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

nlohmann::json AttackNetConfig::to_json() const {
  return nlohmann::json{{"channels", channels}, {"blocks", blocks}};
}

AttackNetConfig AttackNetConfig::from_json(const nlohmann::json& doc) {
  AttackNetConfig cfg;
  cfg.channels = doc.value("channels", cfg.channels);
  cfg.blocks = doc.value("blocks", cfg.blocks);
  return cfg;
}

// Everything the backward pass needs from one training-mode forward pass.
struct ForwardTrace {
  AttackNet::ChannelStack input;
  AttackNet::NormCache stem_norm;
  AttackNet::ChannelStack stem_act;
  struct BlockTrace {
    AttackNet::ChannelStack in;
    AttackNet::NormCache norm1;
    AttackNet::ChannelStack act1;
    AttackNet::NormCache norm2;
    AttackNet::ChannelStack pre_out;  // norm2 output + skip, before ReLU
    AttackNet::ChannelStack out;
  };
  std::vector<BlockTrace> blocks;
  Eigen::MatrixXd pooled;  // n x channels
  Eigen::VectorXd logits;
};

AttackNet::AttackNet(int width, const AttackNetConfig& config, uint64_t seed)
    : width_(width), config_(config), init_seed_(seed) {
  if (width < 1) throw ValidationError("input width must be positive");
  if (config.channels < 1 || config.blocks < 0) {
    throw ValidationError("invalid attack network configuration");
  }
  const int c = config.channels;

  int64_t p = 0;  // params_ cursor
  int64_t r = 0;  // running_ cursor
  const auto add_conv = [&](int in_ch, int out_ch) {
    ConvRef conv{p, p + static_cast<int64_t>(out_ch) * in_ch * 3, in_ch,
                 out_ch};
    p = conv.b + out_ch;
    convs_.push_back(conv);
    return conv;
  };
  const auto add_norm = [&](int channels) {
    NormRef norm{p, p + channels, r, r + channels, channels};
    p += 2 * channels;
    r += 2 * channels;
    norms_.push_back(norm);
    return norm;
  };

  add_conv(1, c);
  add_norm(c);
  for (int b = 0; b < config.blocks; ++b) {
    add_conv(c, c);
    add_norm(c);
    add_conv(c, c);
    add_norm(c);
  }
  head_w_ = p;
  p += c;
  head_b_ = p;
  p += 1;

  params_.setZero(p);
  running_.setZero(r);
  input_offset_ = Eigen::VectorXd::Zero(width);
  input_scale_ = Eigen::VectorXd::Ones(width);

  // Named slices, for checkpoints.
  const auto conv_name = [](size_t i) {
    if (i == 0) return std::string("stem.conv");
    const size_t b = (i - 1) / 2;
    return "block" + std::to_string(b) + ".conv" + std::to_string((i - 1) % 2 + 1);
  };
  const auto norm_name = [](size_t i) {
    if (i == 0) return std::string("stem.norm");
    const size_t b = (i - 1) / 2;
    return "block" + std::to_string(b) + ".norm" + std::to_string((i - 1) % 2 + 1);
  };
  for (size_t i = 0; i < convs_.size(); ++i) {
    const auto& conv = convs_[i];
    layout_.push_back(ParamBlock{conv_name(i) + ".weight", conv.w,
                                 conv.out_channels, conv.in_channels * 3});
    layout_.push_back(
        ParamBlock{conv_name(i) + ".bias", conv.b, conv.out_channels, 1});
  }
  for (size_t i = 0; i < norms_.size(); ++i) {
    const auto& norm = norms_[i];
    layout_.push_back(
        ParamBlock{norm_name(i) + ".gamma", norm.gamma, norm.channels, 1});
    layout_.push_back(
        ParamBlock{norm_name(i) + ".beta", norm.beta, norm.channels, 1});
    running_layout_.push_back(
        ParamBlock{norm_name(i) + ".running_mean", norm.mean, norm.channels, 1});
    running_layout_.push_back(
        ParamBlock{norm_name(i) + ".running_var", norm.var, norm.channels, 1});
  }
  layout_.push_back(ParamBlock{"head.weight", head_w_, c, 1});
  layout_.push_back(ParamBlock{"head.bias", head_b_, 1, 1});

  // Initialization: convolutions and head uniform by fan-in, normalization
  // layers at identity (gamma 1, beta 0), running stats at (0, 1).
  Rng rng(seed);
  for (const auto& conv : convs_) {
    const double bound = 1.0 / std::sqrt(3.0 * conv.in_channels);
    const int64_t n_w = static_cast<int64_t>(conv.out_channels) *
                        conv.in_channels * 3;
    for (int64_t i = 0; i < n_w; ++i) {
      params_[conv.w + i] = rng.uniform(-bound, bound);
    }
    for (int i = 0; i < conv.out_channels; ++i) {
      params_[conv.b + i] = rng.uniform(-bound, bound);
    }
  }
  for (const auto& norm : norms_) {
    for (int i = 0; i < norm.channels; ++i) {
      params_[norm.gamma + i] = 1.0;
      params_[norm.beta + i] = 0.0;
      running_[norm.mean + i] = 0.0;
      running_[norm.var + i] = 1.0;
    }
  }
  {
    const double bound = 1.0 / std::sqrt(static_cast<double>(c));
    for (int i = 0; i < c; ++i) {
      params_[head_w_ + i] = rng.uniform(-bound, bound);
    }
    params_[head_b_] = rng.uniform(-bound, bound);
  }
}

AttackNet::ChannelStack AttackNet::conv_forward(const ConvRef& conv,
                                                const ChannelStack& in) const {
  const Eigen::Index n = in[0].rows();
  const Eigen::Index w = in[0].cols();
  ChannelStack out(conv.out_channels, Eigen::MatrixXd::Zero(n, w));
  for (int co = 0; co < conv.out_channels; ++co) {
    auto& o = out[co];
    o.array() += params_[conv.b + co];
    for (int ci = 0; ci < conv.in_channels; ++ci) {
      const int64_t base =
          conv.w + (static_cast<int64_t>(co) * conv.in_channels + ci) * 3;
      const double w0 = params_[base];
      const double w1 = params_[base + 1];
      const double w2 = params_[base + 2];
      const auto& x = in[ci];
      o += w1 * x;
      if (w > 1) {
        o.middleCols(1, w - 1) += w0 * x.middleCols(0, w - 1);
        o.middleCols(0, w - 1) += w2 * x.middleCols(1, w - 1);
      }
    }
  }
  return out;
}

void AttackNet::conv_backward(const ConvRef& conv, const ChannelStack& in,
                              const ChannelStack& d_out, ChannelStack& d_in,
                              Eigen::VectorXd& grads) const {
  const Eigen::Index w = in[0].cols();
  d_in.assign(conv.in_channels,
              Eigen::MatrixXd::Zero(in[0].rows(), in[0].cols()));
  for (int co = 0; co < conv.out_channels; ++co) {
    const auto& g = d_out[co];
    grads[conv.b + co] += g.sum();
    for (int ci = 0; ci < conv.in_channels; ++ci) {
      const int64_t base =
          conv.w + (static_cast<int64_t>(co) * conv.in_channels + ci) * 3;
      const auto& x = in[ci];
      grads[base + 1] += (g.array() * x.array()).sum();
      d_in[ci] += params_[base + 1] * g;
      if (w > 1) {
        grads[base] += (g.middleCols(1, w - 1).array() *
                        x.middleCols(0, w - 1).array())
                           .sum();
        grads[base + 2] += (g.middleCols(0, w - 1).array() *
                            x.middleCols(1, w - 1).array())
                               .sum();
        d_in[ci].middleCols(0, w - 1) +=
            params_[base] * g.middleCols(1, w - 1);
        d_in[ci].middleCols(1, w - 1) +=
            params_[base + 2] * g.middleCols(0, w - 1);
      }
    }
  }
}

AttackNet::ChannelStack AttackNet::norm_forward(const NormRef& norm,
                                                const ChannelStack& in,
                                                bool training,
                                                NormCache* cache) const {
  ChannelStack out(norm.channels);
  if (cache) {
    cache->input = in;
    cache->normalized.resize(norm.channels);
    cache->mean.resize(norm.channels);
    cache->var.resize(norm.channels);
  }
  for (int c = 0; c < norm.channels; ++c) {
    double mean, var;
    if (training) {
      const double count = static_cast<double>(in[c].size());
      mean = in[c].sum() / count;
      var = (in[c].array() - mean).square().sum() / count;
    } else {
      mean = running_[norm.mean + c];
      var = running_[norm.var + c];
    }
    const double inv_std = 1.0 / std::sqrt(var + kNormEps);
    Eigen::MatrixXd normalized = (in[c].array() - mean).matrix() * inv_std;
    out[c] = params_[norm.gamma + c] * normalized;
    out[c].array() += params_[norm.beta + c];
    if (cache) {
      cache->normalized[c] = std::move(normalized);
      cache->mean[c] = mean;
      cache->var[c] = var;
    }
  }
  return out;
}

void AttackNet::norm_backward(const NormRef& norm, const NormCache& cache,
                              const ChannelStack& d_out, ChannelStack& d_in,
                              Eigen::VectorXd& grads) const {
  d_in.resize(norm.channels);
  for (int c = 0; c < norm.channels; ++c) {
    const auto& g = d_out[c];
    const auto& xhat = cache.normalized[c];
    const double count = static_cast<double>(g.size());
    grads[norm.gamma + c] += (g.array() * xhat.array()).sum();
    grads[norm.beta + c] += g.sum();

    const double inv_std = 1.0 / std::sqrt(cache.var[c] + kNormEps);
    const Eigen::MatrixXd d_xhat = params_[norm.gamma + c] * g;
    const Eigen::MatrixXd centered =
        (cache.input[c].array() - cache.mean[c]).matrix();
    const double d_var = -0.5 * std::pow(inv_std, 3) *
                         (d_xhat.array() * centered.array()).sum();
    const double d_mean = -inv_std * d_xhat.sum() +
                          d_var * (-2.0 / count) * centered.sum();
    d_in[c] = inv_std * d_xhat + (2.0 * d_var / count) * centered;
    d_in[c].array() += d_mean / count;
  }
}

void AttackNet::norm_update_running(const NormRef& norm,
                                    const NormCache& cache) {
  for (int c = 0; c < norm.channels; ++c) {
    running_[norm.mean + c] = (1.0 - kRunningMomentum) * running_[norm.mean + c] +
                              kRunningMomentum * cache.mean[c];
    running_[norm.var + c] = (1.0 - kRunningMomentum) * running_[norm.var + c] +
                             kRunningMomentum * cache.var[c];
  }
}

namespace {

AttackNet::ChannelStack relu(const AttackNet::ChannelStack& in) {
  AttackNet::ChannelStack out(in.size());
  for (size_t c = 0; c < in.size(); ++c) out[c] = in[c].cwiseMax(0.0);
  return out;
}

// dLoss/dPre from dLoss/dPost with the post-activation as mask.
void relu_backward(const AttackNet::ChannelStack& act,
                   AttackNet::ChannelStack& d) {
  for (size_t c = 0; c < act.size(); ++c) {
    d[c].array() *= (act[c].array() > 0.0).cast<double>();
  }
}

}  // namespace

void AttackNet::set_input_standardization(Eigen::VectorXd offset,
                                          Eigen::VectorXd scale) {
  if (offset.size() != width_ || scale.size() != width_) {
    throw ValidationError("standardization statistics must match the width");
  }
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    if (!(scale[i] > 0.0)) {
      throw ValidationError("standardization scales must be positive");
    }
  }
  input_offset_ = std::move(offset);
  input_scale_ = std::move(scale);
}

Eigen::VectorXd AttackNet::forward_logits(const Eigen::MatrixXd& errors,
                                          bool training,
                                          ForwardTrace* trace) const {
  if (errors.cols() != width_) {
    throw ValidationError("scorer input width " + std::to_string(errors.cols()) +
                          " does not match configured width " +
                          std::to_string(width_));
  }
  Eigen::MatrixXd standardized(errors.rows(), errors.cols());
  for (int c = 0; c < width_; ++c) {
    standardized.col(c) =
        (errors.col(c).array() - input_offset_[c]) / input_scale_[c];
  }
  ChannelStack act;
  {
    ChannelStack input(1, standardized);
    ChannelStack stem = conv_forward(convs_[0], input);
    NormCache stem_cache;
    act = relu(norm_forward(norms_[0], stem, training,
                            trace ? &stem_cache : nullptr));
    if (trace) {
      trace->input = std::move(input);
      trace->stem_norm = std::move(stem_cache);
      trace->stem_act = act;
    }
  }
  for (int b = 0; b < config_.blocks; ++b) {
    const auto& conv1 = convs_[1 + 2 * b];
    const auto& norm1 = norms_[1 + 2 * b];
    const auto& conv2 = convs_[2 + 2 * b];
    const auto& norm2 = norms_[2 + 2 * b];
    ForwardTrace::BlockTrace bt;
    if (trace) bt.in = act;
    NormCache cache1, cache2;
    ChannelStack y = relu(norm_forward(norm1, conv_forward(conv1, act),
                                       training, trace ? &cache1 : nullptr));
    ChannelStack z = norm_forward(norm2, conv_forward(conv2, y), training,
                                  trace ? &cache2 : nullptr);
    for (size_t c = 0; c < z.size(); ++c) z[c] += act[c];  // skip connection
    ChannelStack out = relu(z);
    if (trace) {
      bt.norm1 = std::move(cache1);
      bt.act1 = std::move(y);
      bt.norm2 = std::move(cache2);
      bt.pre_out = std::move(z);
      bt.out = out;
      trace->blocks.push_back(std::move(bt));
    }
    act = std::move(out);
  }

  // Pooling and the head run as fixed-order scalar loops so a row's score
  // is bit-identical for any batch size.
  const int c_total = config_.channels;
  Eigen::MatrixXd pooled(errors.rows(), c_total);
  Eigen::VectorXd logits(errors.rows());
  for (Eigen::Index r = 0; r < errors.rows(); ++r) {
    double logit = params_[head_b_];
    for (int c = 0; c < c_total; ++c) {
      double sum = 0.0;
      for (int i = 0; i < width_; ++i) sum += act[c](r, i);
      pooled(r, c) = sum / static_cast<double>(width_);
      logit += pooled(r, c) * params_[head_w_ + c];
    }
    logits[r] = logit;
  }
  if (trace) {
    trace->pooled = std::move(pooled);
    trace->logits = logits;
  }
  return logits;
}

Eigen::VectorXd AttackNet::score(const Eigen::MatrixXd& errors) const {
  const Eigen::VectorXd logits = forward_logits(errors, /*training=*/false,
                                                nullptr);
  return logits.unaryExpr([](double z) { return sigmoid(z); });
}

double AttackNet::train_step_loss(const Eigen::MatrixXd& errors,
                                  const std::vector<Membership>& labels,
                                  Eigen::VectorXd& grads,
                                  bool update_running) {
  if (static_cast<Eigen::Index>(labels.size()) != errors.rows()) {
    throw ValidationError("one label per row required");
  }
  const Eigen::Index n = errors.rows();
  ForwardTrace trace;
  const Eigen::VectorXd logits = forward_logits(errors, /*training=*/true,
                                                &trace);

  double loss = 0.0;
  Eigen::VectorXd d_logits(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y =
        labels[static_cast<size_t>(i)] == Membership::kMember ? 1.0 : 0.0;
    loss += softplus(logits[i]) - y * logits[i];
    d_logits[i] = (sigmoid(logits[i]) - y) / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);

  grads.setZero(params_.size());
  const int c_total = config_.channels;
  // Head.
  Eigen::Map<Eigen::VectorXd>(grads.data() + head_w_, c_total).noalias() +=
      trace.pooled.transpose() * d_logits;
  grads[head_b_] += d_logits.sum();
  Eigen::MatrixXd d_pooled =
      d_logits *
      Eigen::Map<const Eigen::VectorXd>(params_.data() + head_w_, c_total)
          .transpose();
  // Undo global average pooling.
  ChannelStack d_act(c_total);
  const double inv_w = 1.0 / static_cast<double>(width_);
  for (int c = 0; c < c_total; ++c) {
    d_act[c] = (d_pooled.col(c) * inv_w).replicate(1, width_);
  }

  for (int b = config_.blocks - 1; b >= 0; --b) {
    const auto& conv1 = convs_[1 + 2 * b];
    const auto& norm1 = norms_[1 + 2 * b];
    const auto& conv2 = convs_[2 + 2 * b];
    const auto& norm2 = norms_[2 + 2 * b];
    const auto& bt = trace.blocks[static_cast<size_t>(b)];

    relu_backward(bt.out, d_act);  // through the block-output ReLU
    ChannelStack d_skip = d_act;   // skip branch
    ChannelStack d_conv2_out;
    norm_backward(norm2, bt.norm2, d_act, d_conv2_out, grads);
    ChannelStack d_act1;
    conv_backward(conv2, bt.act1, d_conv2_out, d_act1, grads);
    relu_backward(bt.act1, d_act1);
    ChannelStack d_conv1_out;
    norm_backward(norm1, bt.norm1, d_act1, d_conv1_out, grads);
    ChannelStack d_in;
    conv_backward(conv1, bt.in, d_conv1_out, d_in, grads);
    for (int c = 0; c < c_total; ++c) d_in[c] += d_skip[c];
    d_act = std::move(d_in);
  }

  relu_backward(trace.stem_act, d_act);
  ChannelStack d_stem_conv_out;
  norm_backward(norms_[0], trace.stem_norm, d_act, d_stem_conv_out, grads);
  ChannelStack d_input;
  conv_backward(convs_[0], trace.input, d_stem_conv_out, d_input, grads);

  if (update_running) {
    norm_update_running(norms_[0], trace.stem_norm);
    for (int b = 0; b < config_.blocks; ++b) {
      norm_update_running(norms_[1 + 2 * b],
                          trace.blocks[static_cast<size_t>(b)].norm1);
      norm_update_running(norms_[2 + 2 * b],
                          trace.blocks[static_cast<size_t>(b)].norm2);
    }
  }
  return loss;
}

NnAttackResult nn_attack_train(const TErrorMatrix& errors,
                               double train_fraction, const TrainConfig& train,
                               const AttackNetConfig& net_config) {
  train.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1)");
  }
  const int64_t n = errors.n_rows();
  if (n < 2) throw ValidationError("attack needs at least 2 rows");

  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(train.seed, "split"));
  split_rng.shuffle(order);
  const auto n_train = std::max<int64_t>(
      1,
      static_cast<int64_t>(std::floor(train_fraction * static_cast<double>(n))));

  NnAttackResult result{
      AttackNet(static_cast<int>(errors.errors.cols()), net_config,
                derive_seed(train.seed, "init")),
      {}, {}, {}, {}, {}, train_fraction};
  result.train_rows.assign(order.begin(), order.begin() + n_train);
  result.heldout_rows.assign(order.begin() + n_train, order.end());
  std::sort(result.train_rows.begin(), result.train_rows.end());
  std::sort(result.heldout_rows.begin(), result.heldout_rows.end());

  Eigen::MatrixXd train_errors(n_train, errors.errors.cols());
  std::vector<Membership> train_labels(static_cast<size_t>(n_train));
  bool has_member = false, has_nonmember = false;
  for (int64_t i = 0; i < n_train; ++i) {
    train_errors.row(i) = errors.errors.row(result.train_rows[i]);
    train_labels[static_cast<size_t>(i)] =
        errors.labels[static_cast<size_t>(result.train_rows[i])];
    (train_labels[static_cast<size_t>(i)] == Membership::kMember
         ? has_member
         : has_nonmember) = true;
  }
  if (!has_member || !has_nonmember) {
    throw ValidationError("training split contains a single class");
  }

  // Per-column statistics of the training rows, population convention; a
  // constant column keeps unit scale.
  {
    Eigen::VectorXd offset(train_errors.cols());
    Eigen::VectorXd scale(train_errors.cols());
    for (Eigen::Index c = 0; c < train_errors.cols(); ++c) {
      const double mean = train_errors.col(c).mean();
      const double var = (train_errors.col(c).array() - mean).square().mean();
      offset[c] = mean;
      scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    result.net.set_input_standardization(std::move(offset), std::move(scale));
  }

  Optimizer opt(train.optimizer, train.learning_rate);
  Rng shuffle_rng(derive_seed(train.seed, "shuffle"));
  std::vector<int64_t> batch_order(n_train);
  std::iota(batch_order.begin(), batch_order.end(), 0);
  const int64_t batch = std::min<int64_t>(train.batch_size, n_train);
  Eigen::VectorXd grads(result.net.n_params());
  int64_t steps = 0;
  for (int epoch = 0; epoch < train.epochs; ++epoch) {
    shuffle_rng.shuffle(batch_order);
    double epoch_loss = 0.0;
    int64_t rows_seen = 0;
    bool capped = false;
    for (int64_t start = 0; start < n_train; start += batch) {
      if (train.max_steps > 0 && steps >= train.max_steps) {
        capped = true;
        break;
      }
      const int64_t size = std::min(batch, n_train - start);
      Eigen::MatrixXd rows(size, train_errors.cols());
      std::vector<Membership> labels(static_cast<size_t>(size));
      for (int64_t i = 0; i < size; ++i) {
        rows.row(i) = train_errors.row(batch_order[start + i]);
        labels[static_cast<size_t>(i)] =
            train_labels[static_cast<size_t>(batch_order[start + i])];
      }
      const double loss = result.net.train_step_loss(rows, labels, grads);
      if (!std::isfinite(loss)) {
        throw DivergenceError("non-finite attack loss at epoch " +
                              std::to_string(epoch));
      }
      opt.step(result.net.parameters(), grads);
      epoch_loss += loss * static_cast<double>(size);
      rows_seen += size;
      ++steps;
    }
    if (rows_seen > 0) {
      result.epoch_loss.push_back(epoch_loss / static_cast<double>(rows_seen));
    }
    if (capped) break;
  }

  const int64_t n_held = static_cast<int64_t>(result.heldout_rows.size());
  Eigen::MatrixXd held(n_held, errors.errors.cols());
  result.heldout_labels.resize(static_cast<size_t>(n_held));
  for (int64_t i = 0; i < n_held; ++i) {
    held.row(i) = errors.errors.row(result.heldout_rows[i]);
    result.heldout_labels[static_cast<size_t>(i)] =
        errors.labels[static_cast<size_t>(result.heldout_rows[i])];
  }
  result.heldout_scores = result.net.score(held);
  return result;
}

void save_attack_net(const std::filesystem::path& dir, const AttackNet& net,
                     const nlohmann::json& extra_manifest) {
  nlohmann::json manifest = extra_manifest;
  manifest["kind"] = "attack_net";
  manifest["width"] = net.width();
  manifest["config"] = net.config().to_json();
  manifest["seed"] = net.init_seed();

  std::vector<NamedBlob> blobs;
  for (const auto& block : net.layout_) {
    blobs.push_back(NamedBlob{block.name, net.params_.data() + block.offset,
                              block.size()});
  }
  for (const auto& block : net.running_layout_) {
    blobs.push_back(NamedBlob{block.name, net.running_.data() + block.offset,
                              block.size()});
  }
  blobs.push_back(NamedBlob{"input.offset", net.input_offset_.data(),
                            net.input_offset_.size()});
  blobs.push_back(NamedBlob{"input.scale", net.input_scale_.data(),
                            net.input_scale_.size()});
  save_checkpoint(dir, std::move(manifest), blobs);
}

AttackNet load_attack_net(const std::filesystem::path& dir) {
  const Checkpoint ckpt = load_checkpoint(dir);
  const auto manifest = ckpt.manifest();
  if (manifest.at("kind") != "attack_net") {
    throw ValidationError("checkpoint in " + dir.string() +
                          " is not an attack scorer");
  }
  AttackNet net(manifest.at("width"),
                AttackNetConfig::from_json(manifest.at("config")),
                manifest.at("seed"));
  const auto fill = [&](const std::vector<ParamBlock>& layout,
                        Eigen::VectorXd& dest) {
    for (const auto& block : layout) {
      const auto it = ckpt.blobs.find(block.name);
      if (it == ckpt.blobs.end() || it->second.size() != block.size()) {
        throw ValidationError("checkpoint missing parameter block '" +
                              block.name + "'");
      }
      dest.segment(block.offset, block.size()) = it->second;
    }
  };
  fill(net.layout_, net.params_);
  fill(net.running_layout_, net.running_);
  const auto offset = ckpt.blobs.find("input.offset");
  const auto scale = ckpt.blobs.find("input.scale");
  if (offset == ckpt.blobs.end() || scale == ckpt.blobs.end()) {
    throw ValidationError("checkpoint missing input standardization blobs");
  }
  net.set_input_standardization(offset->second, scale->second);
  return net;
}

}  // namespace tabmia
