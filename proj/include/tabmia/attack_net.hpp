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

#ifndef TABMIA_ATTACK_NET_HPP_
#define TABMIA_ATTACK_NET_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "tabmia/mlp.hpp"
#include "tabmia/optim.hpp"
#include "tabmia/secmi.hpp"

namespace tabmia {

struct ForwardTrace;

struct AttackNetConfig {
  int channels = 16;
  int blocks = 4;

  nlohmann::json to_json() const;
  static AttackNetConfig from_json(const nlohmann::json& doc);
};

// 1-D convolutional membership scorer over column-wise t-errors. A stem of
// convolution (kernel 3, stride 1, padding 1) + batch normalization + ReLU
// feeds residual basic blocks (conv-norm-ReLU-conv-norm, skip addition,
// ReLU); global average pooling and an affine head produce one logit per
// row, reported through a logistic as a membership score in (0, 1).
//
// Batch normalization uses batch statistics while training and frozen
// running statistics at inference, so scoring is row-wise independent: a
// batch of one equals the matching row of a batch of many.
class AttackNet {
 public:
  using ChannelStack = std::vector<Eigen::MatrixXd>;  // one [n x width] each

  struct NormCache {
    ChannelStack input;
    ChannelStack normalized;
    Eigen::VectorXd mean;
    Eigen::VectorXd var;
  };

  AttackNet(int width, const AttackNetConfig& config, uint64_t seed);

  int width() const { return width_; }
  const AttackNetConfig& config() const { return config_; }
  uint64_t init_seed() const { return init_seed_; }

  // Fixed per-column affine applied before the stem. Squared residuals from
  // a strongly memorizing target sit many orders of magnitude below the
  // normalization epsilon, which would silence every channel; the trainer
  // fits these statistics on its training rows to restore a workable scale.
  void set_input_standardization(Eigen::VectorXd offset,
                                 Eigen::VectorXd scale);
  const Eigen::VectorXd& input_offset() const { return input_offset_; }
  const Eigen::VectorXd& input_scale() const { return input_scale_; }

  // Inference scores in (0, 1); higher means more member-like.
  Eigen::VectorXd score(const Eigen::MatrixXd& errors) const;

  // Training-mode forward/backward with binary cross-entropy against the
  // labels; returns the mean loss and fills `grads` (aligned with
  // parameters()). Running statistics are updated unless told otherwise.
  double train_step_loss(const Eigen::MatrixXd& errors,
                         const std::vector<Membership>& labels,
                         Eigen::VectorXd& grads, bool update_running = true);

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& running_stats() { return running_; }
  const Eigen::VectorXd& running_stats() const { return running_; }
  int64_t n_params() const { return params_.size(); }
  const std::vector<ParamBlock>& parameter_layout() const { return layout_; }

 private:
  struct ConvRef {
    int64_t w = 0;  // offset of [out][in][3] weights
    int64_t b = 0;  // offset of per-channel bias
    int in_channels = 0;
    int out_channels = 0;
  };
  struct NormRef {
    int64_t gamma = 0;
    int64_t beta = 0;
    int64_t mean = 0;  // offset into running_
    int64_t var = 0;
    int channels = 0;
  };

  ChannelStack conv_forward(const ConvRef& conv, const ChannelStack& in) const;
  void conv_backward(const ConvRef& conv, const ChannelStack& in,
                     const ChannelStack& d_out, ChannelStack& d_in,
                     Eigen::VectorXd& grads) const;
  ChannelStack norm_forward(const NormRef& norm, const ChannelStack& in,
                            bool training, NormCache* cache) const;
  void norm_backward(const NormRef& norm, const NormCache& cache,
                     const ChannelStack& d_out, ChannelStack& d_in,
                     Eigen::VectorXd& grads) const;
  void norm_update_running(const NormRef& norm, const NormCache& cache);

  Eigen::VectorXd forward_logits(const Eigen::MatrixXd& errors, bool training,
                                 ForwardTrace* trace) const;

  int width_;
  AttackNetConfig config_;
  uint64_t init_seed_;
  Eigen::VectorXd params_;
  Eigen::VectorXd running_;  // mean/var per normalization layer
  Eigen::VectorXd input_offset_;
  Eigen::VectorXd input_scale_;
  std::vector<ConvRef> convs_;  // stem, then 2 per block
  std::vector<NormRef> norms_;  // parallel to convs_
  int64_t head_w_ = 0;
  int64_t head_b_ = 0;
  std::vector<ParamBlock> layout_;
  std::vector<ParamBlock> running_layout_;

  friend void save_attack_net(const std::filesystem::path&, const AttackNet&,
                              const nlohmann::json&);
  friend AttackNet load_attack_net(const std::filesystem::path&);
};

struct NnAttackResult {
  AttackNet net;
  std::vector<int64_t> train_rows;
  std::vector<int64_t> heldout_rows;
  Eigen::VectorXd heldout_scores;          // aligned with heldout_rows
  std::vector<Membership> heldout_labels;  // aligned with heldout_rows
  std::vector<double> epoch_loss;
  double train_fraction = 0.0;
};

// Trains the scorer on a seeded fraction of the rows and scores the rest.
// Both classes must appear in the training fraction.
NnAttackResult nn_attack_train(const TErrorMatrix& errors,
                               double train_fraction, const TrainConfig& train,
                               const AttackNetConfig& net_config = {});

void save_attack_net(const std::filesystem::path& dir, const AttackNet& net,
                     const nlohmann::json& extra_manifest);
AttackNet load_attack_net(const std::filesystem::path& dir);

}  // namespace tabmia

#endif  // TABMIA_ATTACK_NET_HPP_
