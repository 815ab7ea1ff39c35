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

#include "tabmia/optim.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "tabmia/errors.hpp"

namespace tabmia {

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ValidationError("unknown optimizer '" + name + "'");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
  if (epochs < 1) throw ValidationError("epochs must be at least 1");
  if (max_steps < 0) throw ValidationError("max_steps must be non-negative");
  if (!(learning_rate > 0.0)) {
    throw ValidationError("learning_rate must be positive");
  }
}

nlohmann::json TrainConfig::to_json() const {
  return nlohmann::json{{"batch_size", batch_size},
                        {"epochs", epochs},
                        {"max_steps", max_steps},
                        {"learning_rate", learning_rate},
                        {"seed", seed},
                        {"optimizer", to_string(optimizer)}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& doc) {
  TrainConfig cfg;
  cfg.batch_size = doc.value("batch_size", cfg.batch_size);
  cfg.epochs = doc.value("epochs", cfg.epochs);
  cfg.max_steps = doc.value("max_steps", cfg.max_steps);
  cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
  cfg.seed = doc.value("seed", cfg.seed);
  if (doc.contains("optimizer")) {
    cfg.optimizer = optimizer_kind_from_string(doc["optimizer"]);
  }
  return cfg;
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate)
    : kind_(kind), lr_(learning_rate) {}

void Optimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
  if (kind_ == OptimizerKind::kSgd) {
    params -= lr_ * grads;
    return;
  }
  if (m_.size() != params.size()) {
    m_.setZero(params.size());
    v_.setZero(params.size());
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grads;
  v_.array() = beta2_ * v_.array() + (1.0 - beta2_) * grads.array().square();
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -=
      lr_ * (m_.array() / bias1) / ((v_.array() / bias2).sqrt() + eps_);
}

}  // namespace tabmia
