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

#include "tabmia/autoencoder.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "tabmia/checkpoint.hpp"
#include "tabmia/errors.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

nlohmann::json AutoencoderConfig::to_json() const {
  return nlohmann::json{{"latent_dim", latent_dim},
                        {"hidden_dim", hidden_dim},
                        {"activation", to_string(activation)}};
}

AutoencoderConfig AutoencoderConfig::from_json(const nlohmann::json& doc) {
  AutoencoderConfig cfg;
  cfg.latent_dim = doc.at("latent_dim");
  cfg.hidden_dim = doc.value("hidden_dim", cfg.hidden_dim);
  if (doc.contains("activation")) {
    cfg.activation = activation_from_string(doc["activation"]);
  }
  return cfg;
}

Autoencoder::Autoencoder(int input_dim, const AutoencoderConfig& config,
                         uint64_t seed)
    : config_(config),
      init_seed_(seed),
      encoder_({input_dim, config.hidden_dim, config.latent_dim},
               config.activation, derive_seed(seed, "encoder"), "encoder."),
      decoder_({config.latent_dim, config.hidden_dim, input_dim},
               config.activation, derive_seed(seed, "decoder"), "decoder.") {
  if (config.latent_dim < 1) {
    throw ValidationError("latent dimension must be positive");
  }
  if (config.latent_dim > input_dim) {
    throw ValidationError("latent dimension " +
                          std::to_string(config.latent_dim) +
                          " exceeds data dimension " +
                          std::to_string(input_dim));
  }
}

Eigen::MatrixXd Autoencoder::encode(const Eigen::MatrixXd& rows) const {
  return encoder_.forward(rows);
}

Eigen::MatrixXd Autoencoder::decode(const Eigen::MatrixXd& latents) const {
  return decoder_.forward(latents);
}

Autoencoder fit_autoencoder(const Eigen::MatrixXd& data,
                            const AutoencoderConfig& config,
                            const TrainConfig& train) {
  train.validate();
  if (data.rows() == 0) throw ValidationError("training data is empty");

  Autoencoder model(static_cast<int>(data.cols()), config, train.seed);
  const int64_t n = data.rows();
  const int64_t batch = std::min<int64_t>(train.batch_size, n);

  Optimizer enc_opt(train.optimizer, train.learning_rate);
  Optimizer dec_opt(train.optimizer, train.learning_rate);
  Rng shuffle_rng(derive_seed(train.seed, "shuffle"));
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  Eigen::VectorXd enc_grads(model.encoder().n_params());
  Eigen::VectorXd dec_grads(model.decoder().n_params());
  int64_t steps = 0;
  for (int epoch = 0; epoch < train.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    bool capped = false;
    for (int64_t start = 0; start < n && !capped; start += batch) {
      if (train.max_steps > 0 && steps >= train.max_steps) {
        capped = true;
        break;
      }
      const int64_t size = std::min(batch, n - start);
      Eigen::MatrixXd rows(size, data.cols());
      for (int64_t i = 0; i < size; ++i) {
        rows.row(i) = data.row(order[start + i]);
      }
      Mlp::Cache enc_cache, dec_cache;
      const Eigen::MatrixXd latent =
          model.encoder().forward(rows, &enc_cache);
      const Eigen::MatrixXd recon =
          model.decoder().forward(latent, &dec_cache);
      const Eigen::MatrixXd residual = recon - rows;
      const double loss = residual.squaredNorm() /
                          static_cast<double>(size * data.cols());
      if (!std::isfinite(loss)) {
        throw DivergenceError("non-finite reconstruction loss at epoch " +
                              std::to_string(epoch));
      }
      const Eigen::MatrixXd d_recon =
          (2.0 / static_cast<double>(size * data.cols())) * residual;
      enc_grads.setZero();
      dec_grads.setZero();
      const Eigen::MatrixXd d_latent =
          model.decoder().backward(dec_cache, d_recon, dec_grads);
      model.encoder().backward(enc_cache, d_latent, enc_grads);
      enc_opt.step(model.encoder().parameters(), enc_grads);
      dec_opt.step(model.decoder().parameters(), dec_grads);
      ++steps;
    }
    if (capped) break;
  }

  const Eigen::MatrixXd recon = model.decode(model.encode(data));
  model.set_training_reconstruction_error(
      (recon - data).squaredNorm() /
      static_cast<double>(data.rows() * data.cols()));
  return model;
}

void save_autoencoder(const std::filesystem::path& dir,
                      const Autoencoder& model,
                      const nlohmann::json& extra_manifest) {
  nlohmann::json manifest = extra_manifest;
  manifest["kind"] = "autoencoder";
  manifest["input_dim"] = model.input_dim();
  manifest["config"] = model.config().to_json();
  manifest["seed"] = model.init_seed();
  manifest["training_reconstruction_error"] =
      model.training_reconstruction_error();

  std::vector<NamedBlob> blobs;
  for (const Mlp* net : {&model.encoder(), &model.decoder()}) {
    const auto& params = net->parameters();
    for (const auto& block : net->layout()) {
      blobs.push_back(
          NamedBlob{block.name, params.data() + block.offset, block.size()});
    }
  }
  save_checkpoint(dir, std::move(manifest), blobs);
}

Autoencoder load_autoencoder(const std::filesystem::path& dir) {
  const Checkpoint ckpt = load_checkpoint(dir);
  const auto manifest = ckpt.manifest();
  if (manifest.at("kind") != "autoencoder") {
    throw ValidationError("checkpoint in " + dir.string() +
                          " is not an autoencoder");
  }
  Autoencoder model(manifest.at("input_dim"),
                    AutoencoderConfig::from_json(manifest.at("config")),
                    manifest.at("seed"));
  model.set_training_reconstruction_error(
      manifest.at("training_reconstruction_error"));
  for (Mlp* net : {&model.encoder(), &model.decoder()}) {
    auto& params = net->parameters();
    for (const auto& block : net->layout()) {
      const auto it = ckpt.blobs.find(block.name);
      if (it == ckpt.blobs.end() || it->second.size() != block.size()) {
        throw ValidationError("checkpoint missing parameter block '" +
                              block.name + "'");
      }
      params.segment(block.offset, block.size()) = it->second;
    }
  }
  return model;
}

}  // namespace tabmia
