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

#ifndef TABMIA_PIPELINE_HPP_
#define TABMIA_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tabmia/autoencoder.hpp"
#include "tabmia/optim.hpp"

namespace tabmia {

enum class AttackKind { kStat, kNn, kBoth };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& name);

// Resolved configuration of one audit run. Every stage-level random draw
// derives from `seed` by stage-name hashing, so stages replay independently.
struct RunConfig {
  std::string data_csv;
  std::string schema_path;
  double member_fraction = 0.9;
  int64_t subsample_n = 0;  // 0 = use the full table
  bool include_categorical = false;
  uint64_t seed = 0;

  // schedule
  std::string schedule_kind = "cosine";
  int timesteps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  double cosine_s = 0.008;

  // denoiser
  std::vector<int> hidden_dims = {128, 128};
  int embed_dim = 16;
  TrainConfig denoiser_train;

  // latent pathway
  bool latent = false;
  AutoencoderConfig autoencoder;
  TrainConfig autoencoder_train;

  // attack
  AttackKind attack = AttackKind::kBoth;
  int attack_t = 50;
  double stat_calibration_fraction = 0.2;
  double nn_train_fraction = 0.2;
  bool literal_step_indexing = false;
  int nn_channels = 16;
  int nn_blocks = 4;
  TrainConfig nn_train;

  // report
  std::vector<double> fpr_targets = {0.01, 0.001};
  int ratio_t_start = 20;
  int ratio_t_stop = 300;
  int ratio_t_step = 10;

  int64_t n_samples = 1000;

  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig from_file(const std::filesystem::path& path);
};

RunConfig load_run_config(const std::filesystem::path& run_dir);

// Rewrites the echoed configuration (used when stage-level flag overrides
// change it after prepare).
void update_run_config(const RunConfig& config,
                       const std::filesystem::path& run_dir);

// Pipeline stages. Each stage takes a run directory, reads the echoed config
// plus its upstream artifacts, and writes its own artifact subdirectory.
// Stages hold an exclusive lock file for their duration.
void cmd_prepare(const RunConfig& config, const std::filesystem::path& run_dir);
void cmd_train(const std::filesystem::path& run_dir);
void cmd_sample(const std::filesystem::path& run_dir);
void cmd_attack(const std::filesystem::path& run_dir);
void cmd_report(const std::filesystem::path& run_dir);
void cmd_all(const RunConfig& config, const std::filesystem::path& run_dir);

}  // namespace tabmia

#endif  // TABMIA_PIPELINE_HPP_
