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

#ifndef TABMIA_MLP_HPP_
#define TABMIA_MLP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tabmia {

enum class Activation { kSilu, kIdentity };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

// One named slice of a flat parameter vector.
struct ParamBlock {
  std::string name;
  int64_t offset = 0;
  int rows = 0;
  int cols = 0;  // 1 for bias vectors
  int64_t size() const { return static_cast<int64_t>(rows) * cols; }
};

// Fully connected network over a single flat parameter vector. Hidden layers
// use the configured activation; the output layer is linear. Weights are
// drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
//
// Rows of the input matrix are samples. Gradients are produced by reverse
// accumulation into a vector aligned with parameters().
class Mlp {
 public:
  // dims = {input, hidden..., output}; at least one hidden layer.
  Mlp(std::vector<int> dims, Activation hidden_activation, uint64_t seed,
      std::string block_prefix = "");

  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  const std::vector<int>& dims() const { return dims_; }
  Activation hidden_activation() const { return activation_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  const std::vector<ParamBlock>& layout() const { return layout_; }
  int64_t n_params() const { return params_.size(); }

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // layer inputs, acts[0] = X
    std::vector<Eigen::MatrixXd> pre;          // pre-activation per layer
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache* cache) const;

  // Accumulates parameter gradients for dLoss/dOutput into `grads` (which
  // must be zeroed or hold prior accumulation) and returns dLoss/dInput.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                           Eigen::VectorXd& grads) const;

 private:
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  std::vector<int> dims_;
  Activation activation_;
  Eigen::VectorXd params_;
  std::vector<ParamBlock> layout_;  // weight/bias pairs per layer
};

}  // namespace tabmia

#endif  // TABMIA_MLP_HPP_
