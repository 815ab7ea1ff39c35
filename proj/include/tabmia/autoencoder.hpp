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

#ifndef TABMIA_AUTOENCODER_HPP_
#define TABMIA_AUTOENCODER_HPP_

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "tabmia/mlp.hpp"
#include "tabmia/optim.hpp"

namespace tabmia {

struct AutoencoderConfig {
  int latent_dim = 0;
  int hidden_dim = 32;
  Activation activation = Activation::kSilu;

  nlohmann::json to_json() const;
  static AutoencoderConfig from_json(const nlohmann::json& doc);
};

// Deterministic encoder/decoder pair (one hidden layer each) used for the
// latent diffusion pathway. Trained to minimize mean squared reconstruction
// error; the final training error is recorded on the model.
class Autoencoder {
 public:
  Autoencoder(int input_dim, const AutoencoderConfig& config, uint64_t seed);

  int input_dim() const { return encoder_.input_dim(); }
  int latent_dim() const { return encoder_.output_dim(); }
  const AutoencoderConfig& config() const { return config_; }
  uint64_t init_seed() const { return init_seed_; }

  Eigen::MatrixXd encode(const Eigen::MatrixXd& rows) const;
  Eigen::MatrixXd decode(const Eigen::MatrixXd& latents) const;

  double training_reconstruction_error() const { return train_mse_; }

  Mlp& encoder() { return encoder_; }
  Mlp& decoder() { return decoder_; }
  const Mlp& encoder() const { return encoder_; }
  const Mlp& decoder() const { return decoder_; }

  void set_training_reconstruction_error(double mse) { train_mse_ = mse; }

 private:
  AutoencoderConfig config_;
  uint64_t init_seed_;
  Mlp encoder_;
  Mlp decoder_;
  double train_mse_ = -1.0;
};

// Trains a fresh autoencoder on `data`. latent_dim must not exceed the data
// width. Aborts with DivergenceError on non-finite loss.
Autoencoder fit_autoencoder(const Eigen::MatrixXd& data,
                            const AutoencoderConfig& config,
                            const TrainConfig& train);

void save_autoencoder(const std::filesystem::path& dir,
                      const Autoencoder& model,
                      const nlohmann::json& extra_manifest);
Autoencoder load_autoencoder(const std::filesystem::path& dir);

}  // namespace tabmia

#endif  // TABMIA_AUTOENCODER_HPP_
