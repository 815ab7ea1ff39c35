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

#ifndef TABMIA_OPTIM_HPP_
#define TABMIA_OPTIM_HPP_

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include <nlohmann/json_fwd.hpp>

namespace tabmia {

enum class OptimizerKind { kSgd, kAdam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

// Shared knobs for every trainable model in the toolkit.
struct TrainConfig {
  int batch_size = 256;
  int epochs = 1;
  // Optional cap on total optimizer steps; 0 means no cap. Loss traces and
  // manifests record which limit actually stopped the run.
  int64_t max_steps = 0;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& doc);
};

// Element-wise first-order update over one flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grads);

 private:
  OptimizerKind kind_;
  double lr_;
  // Adam moments.
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  int64_t t_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

}  // namespace tabmia

#endif  // TABMIA_OPTIM_HPP_
