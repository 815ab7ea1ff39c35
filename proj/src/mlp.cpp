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

#include "tabmia/mlp.hpp"

#include <cmath>

#include "tabmia/errors.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// silu(x) = x * sigmoid(x)
inline double silu(double x) { return x * sigmoid(x); }

inline double silu_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

}  // namespace

std::string to_string(Activation act) {
  return act == Activation::kSilu ? "silu" : "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "silu") return Activation::kSilu;
  if (name == "identity") return Activation::kIdentity;
  throw ValidationError("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<int> dims, Activation hidden_activation, uint64_t seed,
         std::string block_prefix)
    : dims_(std::move(dims)), activation_(hidden_activation) {
  if (dims_.size() < 3) {
    throw ValidationError("network needs at least one hidden layer");
  }
  for (int d : dims_) {
    if (d < 1) throw ValidationError("layer width must be positive");
  }
  int64_t total = 0;
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    const std::string base = block_prefix + "layer" + std::to_string(l);
    layout_.push_back(
        ParamBlock{base + ".weight", total, dims_[l + 1], dims_[l]});
    total += layout_.back().size();
    layout_.push_back(ParamBlock{base + ".bias", total, dims_[l + 1], 1});
    total += layout_.back().size();
  }
  params_.resize(total);
  Rng rng(seed);
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    const auto& w = layout_[2 * l];
    const auto& b = layout_[2 * l + 1];
    for (int64_t i = 0; i < w.size(); ++i) {
      params_[w.offset + i] = rng.uniform(-bound, bound);
    }
    for (int64_t i = 0; i < b.size(); ++i) {
      params_[b.offset + i] = rng.uniform(-bound, bound);
    }
  }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int layer) const {
  const auto& block = layout_[2 * layer];
  return {params_.data() + block.offset, block.rows, block.cols};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
  const auto& block = layout_[2 * layer + 1];
  return {params_.data() + block.offset, block.rows};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  return forward(input, nullptr);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input,
                             Cache* cache) const {
  if (input.cols() != dims_.front()) {
    throw ValidationError("network input has " + std::to_string(input.cols()) +
                          " dimensions, expected " +
                          std::to_string(dims_.front()));
  }
  const int n_layers = static_cast<int>(dims_.size()) - 1;
  if (cache) {
    cache->activations.assign(1, input);
    cache->pre.clear();
  }
  Eigen::MatrixXd act = input;
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd pre = act * weight(l).transpose();
    pre.rowwise() += bias(l).transpose();
    if (cache) cache->pre.push_back(pre);
    if (l + 1 < n_layers && activation_ == Activation::kSilu) {
      act = pre.unaryExpr([](double x) { return silu(x); });
    } else {
      act = std::move(pre);
    }
    if (cache && l + 1 < n_layers) cache->activations.push_back(act);
  }
  return act;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                              Eigen::VectorXd& grads) const {
  const int n_layers = static_cast<int>(dims_.size()) - 1;
  Eigen::MatrixXd delta = d_out;  // dLoss/dPre of the layer being processed
  for (int l = n_layers - 1; l >= 0; --l) {
    if (l < n_layers - 1 && activation_ == Activation::kSilu) {
      delta.array() *=
          cache.pre[l].unaryExpr([](double x) { return silu_grad(x); }).array();
    }
    const auto& wb = layout_[2 * l];
    const auto& bb = layout_[2 * l + 1];
    Eigen::Map<Eigen::MatrixXd> d_w(grads.data() + wb.offset, wb.rows,
                                    wb.cols);
    Eigen::Map<Eigen::VectorXd> d_b(grads.data() + bb.offset, bb.rows);
    d_w.noalias() += delta.transpose() * cache.activations[l];
    d_b.noalias() += delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * weight(l)).eval();
    } else {
      return delta * weight(0);
    }
  }
  return {};  // unreachable
}

}  // namespace tabmia
