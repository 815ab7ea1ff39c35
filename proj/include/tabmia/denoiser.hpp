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

#ifndef TABMIA_DENOISER_HPP_
#define TABMIA_DENOISER_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "tabmia/mlp.hpp"
#include "tabmia/optim.hpp"
#include "tabmia/schedule.hpp"

namespace tabmia {

// Anything that estimates the noise inside x_t given (x_t, t). Row-wise pure
// and deterministic. Test stubs implement this next to their tests.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  virtual int dim() const = 0;
  // One timestep per row; output has the shape of `xt`.
  virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& xt,
                                  const std::vector<int>& t) const = 0;
  // Convenience: same timestep for every row.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& xt, int t) const {
    return predict(xt, std::vector<int>(xt.rows(), t));
  }
};

// Sinusoidal position code for a timestep; embed_dim must be even.
Eigen::VectorXd timestep_embedding(int t, int embed_dim);

// Noise-prediction MLP: the timestep embedding is concatenated to x_t and
// the network returns an estimate of the injected noise, same width as x_t.
// Hidden layers use SiLU. The schedule it was built against travels with the
// model so downstream operators and checkpoints always agree on it.
class Denoiser : public NoisePredictor {
 public:
  Denoiser(int input_dim, std::vector<int> hidden_dims, int embed_dim,
           uint64_t seed, NoiseSchedule schedule);

  int dim() const override { return input_dim_; }
  int embed_dim() const { return embed_dim_; }
  const std::vector<int>& hidden_dims() const { return hidden_dims_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  uint64_t init_seed() const { return init_seed_; }

  // Validates finiteness and 0 <= t <= T for every row. t = 0 is allowed
  // because the deterministic diffusion operators start from clean data.
  using NoisePredictor::predict;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& xt,
                          const std::vector<int>& t) const override;

  Eigen::VectorXd& parameters() { return net_.parameters(); }
  const Eigen::VectorXd& parameters() const { return net_.parameters(); }
  const std::vector<ParamBlock>& parameter_layout() const {
    return net_.layout();
  }

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  // Builds the (x_t, embedding) design matrix fed to the network.
  Eigen::MatrixXd assemble_input(const Eigen::MatrixXd& xt,
                                 const std::vector<int>& t) const;

 private:
  int input_dim_;
  std::vector<int> hidden_dims_;
  int embed_dim_;
  uint64_t init_seed_;
  NoiseSchedule schedule_;
  Mlp net_;
};

struct ForwardSample {
  Eigen::VectorXd x0;
  int t = 0;
  Eigen::VectorXd eps;
  Eigen::VectorXd xt;
};

// Closed-form marginal of the forward process:
//   x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps.
ForwardSample forward_diffuse(const Eigen::VectorXd& x0, int t,
                              const Eigen::VectorXd& eps,
                              const NoiseSchedule& schedule);

struct DiffusionLoss {
  double loss = 0.0;
  Eigen::VectorXd grads;  // aligned with Denoiser::parameters()
};

// Draws one (t, eps) pair per batch row from Rng(noise_seed), forms x_t, and
// returns the mean squared noise-prediction error with its parameter
// gradients. Deterministic in (parameters, batch, noise_seed), which is what
// makes finite-difference verification possible.
DiffusionLoss diffusion_loss(const Denoiser& model,
                             const Eigen::MatrixXd& batch, uint64_t noise_seed,
                             bool want_grads = true);

struct DenoiserTrainResult {
  std::vector<double> epoch_loss;  // mean loss per epoch
  int64_t steps = 0;
  bool stopped_by_max_steps = false;
};

// Shuffled mini-batch training with the configured optimizer. Aborts with
// DivergenceError (naming the epoch) if the loss goes non-finite.
DenoiserTrainResult train_denoiser(Denoiser& model, const Eigen::MatrixXd& data,
                                   const TrainConfig& config);

// Ancestral sampling of n rows in encoded space, starting from pure noise.
// The posterior variance is beta_t; no noise is added on the final step.
Eigen::MatrixXd sample_rows(const Denoiser& model, int64_t n, uint64_t seed);

// Checkpoint I/O (JSON manifest + little-endian float64 blob file).
void save_denoiser(const std::filesystem::path& dir, const Denoiser& model,
                   const nlohmann::json& extra_manifest);
Denoiser load_denoiser(const std::filesystem::path& dir);

}  // namespace tabmia

#endif  // TABMIA_DENOISER_HPP_
