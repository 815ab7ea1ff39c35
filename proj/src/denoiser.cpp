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

#include "tabmia/denoiser.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "tabmia/checkpoint.hpp"
#include "tabmia/errors.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

namespace {

std::vector<int> denoiser_dims(int input_dim, const std::vector<int>& hidden,
                               int embed_dim) {
  if (input_dim < 1) throw ValidationError("input dimension must be positive");
  if (hidden.empty()) {
    throw ValidationError("denoiser needs at least one hidden layer");
  }
  if (embed_dim < 2 || embed_dim % 2 != 0) {
    throw ValidationError("timestep embedding width must be even and >= 2");
  }
  std::vector<int> dims;
  dims.push_back(input_dim + embed_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(input_dim);
  return dims;
}

}  // namespace

Eigen::VectorXd timestep_embedding(int t, int embed_dim) {
  const int half = embed_dim / 2;
  Eigen::VectorXd emb(embed_dim);
  for (int i = 0; i < half; ++i) {
    const double freq =
        half > 1 ? std::exp(-std::log(10000.0) * i / (half - 1)) : 1.0;
    emb[i] = std::sin(t * freq);
    emb[half + i] = std::cos(t * freq);
  }
  return emb;
}

Denoiser::Denoiser(int input_dim, std::vector<int> hidden_dims, int embed_dim,
                   uint64_t seed, NoiseSchedule schedule)
    : input_dim_(input_dim),
      hidden_dims_(std::move(hidden_dims)),
      embed_dim_(embed_dim),
      init_seed_(seed),
      schedule_(std::move(schedule)),
      net_(denoiser_dims(input_dim, hidden_dims_, embed_dim),
           Activation::kSilu, seed) {}

Eigen::MatrixXd Denoiser::assemble_input(const Eigen::MatrixXd& xt,
                                         const std::vector<int>& t) const {
  Eigen::MatrixXd input(xt.rows(), input_dim_ + embed_dim_);
  input.leftCols(input_dim_) = xt;
  for (Eigen::Index r = 0; r < xt.rows(); ++r) {
    input.row(r).tail(embed_dim_) =
        timestep_embedding(t[static_cast<size_t>(r)], embed_dim_).transpose();
  }
  return input;
}

Eigen::MatrixXd Denoiser::predict(const Eigen::MatrixXd& xt,
                                  const std::vector<int>& t) const {
  if (xt.cols() != input_dim_) {
    throw ValidationError("input has " + std::to_string(xt.cols()) +
                          " dimensions, model expects " +
                          std::to_string(input_dim_));
  }
  if (static_cast<Eigen::Index>(t.size()) != xt.rows()) {
    throw ValidationError("one timestep per row required");
  }
  if (!xt.allFinite()) {
    throw ValidationError("non-finite values in noise-prediction input");
  }
  for (int ti : t) {
    if (ti < 0 || ti > schedule_.timesteps()) {
      throw ValidationError("timestep " + std::to_string(ti) +
                            " outside [0, " +
                            std::to_string(schedule_.timesteps()) + "]");
    }
  }
  return net_.forward(assemble_input(xt, t));
}

ForwardSample forward_diffuse(const Eigen::VectorXd& x0, int t,
                              const Eigen::VectorXd& eps,
                              const NoiseSchedule& schedule) {
  if (x0.size() != eps.size()) {
    throw ValidationError("noise vector width must match the data vector");
  }
  const double bar = schedule.alpha_bar(t);  // validates 0 <= t <= T
  ForwardSample sample;
  sample.x0 = x0;
  sample.t = t;
  sample.eps = eps;
  sample.xt = std::sqrt(bar) * x0 + std::sqrt(1.0 - bar) * eps;
  return sample;
}

DiffusionLoss diffusion_loss(const Denoiser& model,
                             const Eigen::MatrixXd& batch, uint64_t noise_seed,
                             bool want_grads) {
  const Eigen::Index n = batch.rows();
  if (n == 0) throw ValidationError("diffusion loss needs a non-empty batch");
  const int dim = model.dim();
  if (batch.cols() != dim) {
    throw ValidationError("batch width does not match model dimension");
  }
  const auto& sched = model.schedule();

  // All random draws happen up front in a fixed order, so the loss is a
  // deterministic function of (parameters, batch, noise_seed).
  Rng rng(noise_seed);
  std::vector<int> t(static_cast<size_t>(n));
  for (auto& ti : t) {
    ti = static_cast<int>(rng.uniform_int(1, sched.timesteps()));
  }
  Eigen::MatrixXd eps(n, dim);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int c = 0; c < dim; ++c) eps(r, c) = rng.normal();
  }

  Eigen::MatrixXd xt(n, dim);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double bar = sched.alpha_bar(t[static_cast<size_t>(r)]);
    xt.row(r) = std::sqrt(bar) * batch.row(r) +
                std::sqrt(1.0 - bar) * eps.row(r);
  }

  Mlp::Cache cache;
  const Eigen::MatrixXd input = model.assemble_input(xt, t);
  const Eigen::MatrixXd predicted =
      model.net().forward(input, want_grads ? &cache : nullptr);

  const Eigen::MatrixXd residual = predicted - eps;
  DiffusionLoss result;
  result.loss = residual.squaredNorm() / static_cast<double>(n);
  if (want_grads) {
    result.grads = Eigen::VectorXd::Zero(model.parameters().size());
    const Eigen::MatrixXd d_out = (2.0 / static_cast<double>(n)) * residual;
    model.net().backward(cache, d_out, result.grads);
  }
  return result;
}

DenoiserTrainResult train_denoiser(Denoiser& model, const Eigen::MatrixXd& data,
                                   const TrainConfig& config) {
  config.validate();
  if (data.rows() == 0) throw ValidationError("training data is empty");
  const int64_t n = data.rows();
  const int64_t batch = std::min<int64_t>(config.batch_size, n);

  Optimizer opt(config.optimizer, config.learning_rate);
  Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  DenoiserTrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    int64_t rows_seen = 0;
    for (int64_t start = 0; start < n; start += batch) {
      if (config.max_steps > 0 && result.steps >= config.max_steps) {
        result.stopped_by_max_steps = true;
        break;
      }
      const int64_t size = std::min(batch, n - start);
      Eigen::MatrixXd rows(size, data.cols());
      for (int64_t i = 0; i < size; ++i) {
        rows.row(i) = data.row(order[start + i]);
      }
      const auto step = diffusion_loss(
          model, rows,
          derive_seed(config.seed, "noise",
                      static_cast<uint64_t>(result.steps)));
      if (!std::isfinite(step.loss)) {
        throw DivergenceError("non-finite training loss at epoch " +
                              std::to_string(epoch));
      }
      opt.step(model.parameters(), step.grads);
      epoch_loss += step.loss * static_cast<double>(size);
      rows_seen += size;
      ++result.steps;
    }
    if (rows_seen > 0) {
      result.epoch_loss.push_back(epoch_loss / static_cast<double>(rows_seen));
    }
    if (result.stopped_by_max_steps) break;
  }
  return result;
}

Eigen::MatrixXd sample_rows(const Denoiser& model, int64_t n, uint64_t seed) {
  const int dim = model.dim();
  Eigen::MatrixXd x(n, dim);
  if (n == 0) return x;
  const auto& sched = model.schedule();
  Rng rng(seed);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int c = 0; c < dim; ++c) x(r, c) = rng.normal();
  }
  for (int t = sched.timesteps(); t >= 1; --t) {
    const auto step = sched.at(t);
    const Eigen::MatrixXd predicted = model.predict(x, t);
    // Posterior mean of the reverse transition.
    x = (x - (step.beta / std::sqrt(1.0 - step.alpha_bar)) * predicted) /
        std::sqrt(step.alpha);
    if (!x.allFinite()) {
      throw DivergenceError("non-finite state during sampling at timestep " +
                            std::to_string(t));
    }
    if (t > 1) {
      const double sigma = std::sqrt(step.beta);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (int c = 0; c < dim; ++c) x(r, c) += sigma * rng.normal();
      }
    }
  }
  return x;
}

void save_denoiser(const std::filesystem::path& dir, const Denoiser& model,
                   const nlohmann::json& extra_manifest) {
  nlohmann::json manifest = extra_manifest;
  manifest["kind"] = "denoiser";
  manifest["input_dim"] = model.dim();
  manifest["hidden_dims"] = model.hidden_dims();
  manifest["embed_dim"] = model.embed_dim();
  manifest["activation"] = to_string(Activation::kSilu);
  manifest["seed"] = model.init_seed();
  manifest["schedule"] = model.schedule().params_json();

  std::vector<NamedBlob> blobs;
  const auto& params = model.parameters();
  for (const auto& block : model.parameter_layout()) {
    blobs.push_back(
        NamedBlob{block.name, params.data() + block.offset, block.size()});
  }
  save_checkpoint(dir, std::move(manifest), blobs);
}

Denoiser load_denoiser(const std::filesystem::path& dir) {
  const Checkpoint ckpt = load_checkpoint(dir);
  const auto manifest = ckpt.manifest();
  if (manifest.at("kind") != "denoiser") {
    throw ValidationError("checkpoint in " + dir.string() +
                          " is not a denoiser");
  }
  Denoiser model(manifest.at("input_dim"),
                 manifest.at("hidden_dims").get<std::vector<int>>(),
                 manifest.at("embed_dim"), manifest.at("seed"),
                 NoiseSchedule::from_params_json(manifest.at("schedule")));
  auto& params = model.parameters();
  for (const auto& block : model.parameter_layout()) {
    const auto it = ckpt.blobs.find(block.name);
    if (it == ckpt.blobs.end()) {
      throw ValidationError("checkpoint missing parameter block '" +
                            block.name + "'");
    }
    if (it->second.size() != block.size()) {
      throw ValidationError("parameter block '" + block.name +
                            "' has unexpected size");
    }
    params.segment(block.offset, block.size()) = it->second;
  }
  return model;
}

}  // namespace tabmia
