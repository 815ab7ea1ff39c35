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

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tabmia/errors.hpp"
#include "tabmia/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitMissingArtifact = 4;

struct Flags {
  std::string config_path;
  std::string run_dir;
  std::optional<uint64_t> seed;
  std::optional<int> attack_t;
  std::optional<std::string> attack_kind;
  bool latent = false;
  std::optional<int64_t> subsample_n;
  std::optional<int64_t> n_samples;
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "Run configuration (JSON)");
  cmd->add_option("--run-dir", flags.run_dir, "Run directory");
  cmd->add_option("--seed", flags.seed, "Master seed override");
  cmd->add_option("--t", flags.attack_t, "Attack timestep override");
  cmd->add_option("--attack", flags.attack_kind, "Attack kind override")
      ->check(CLI::IsMember({"stat", "nn", "both"}));
  cmd->add_flag("--latent", flags.latent, "Enable the latent pathway");
  cmd->add_option("--subsample", flags.subsample_n,
                  "Subsample the table to N rows before splitting");
  cmd->add_option("--n-samples", flags.n_samples,
                  "Number of synthetic rows for the sample stage");
}

// Precedence: flags > config file > run-dir echo > defaults. The resolved
// configuration is echoed into the run directory by the prepare stage.
tabmia::RunConfig resolve_config(const Flags& flags, bool allow_echo) {
  tabmia::RunConfig config;
  if (!flags.config_path.empty()) {
    config = tabmia::RunConfig::from_file(flags.config_path);
  } else if (allow_echo && !flags.run_dir.empty()) {
    config = tabmia::load_run_config(flags.run_dir);
  } else {
    throw tabmia::ValidationError("--config is required");
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.attack_t) config.attack_t = *flags.attack_t;
  if (flags.attack_kind) {
    config.attack = tabmia::attack_kind_from_string(*flags.attack_kind);
  }
  if (flags.latent) config.latent = true;
  if (flags.subsample_n) config.subsample_n = *flags.subsample_n;
  if (flags.n_samples) config.n_samples = *flags.n_samples;
  return config;
}

std::filesystem::path require_run_dir(const Flags& flags) {
  if (flags.run_dir.empty()) {
    throw tabmia::ValidationError("--run-dir is required");
  }
  return flags.run_dir;
}

bool has_overrides(const Flags& flags) {
  return !flags.config_path.empty() || flags.seed || flags.attack_t ||
         flags.attack_kind || flags.latent || flags.subsample_n ||
         flags.n_samples;
}

// Stages after prepare read the echoed configuration from the run
// directory; explicit flags or a new config file update the echo first.
void sync_echo(const Flags& flags, const std::filesystem::path& run_dir) {
  if (has_overrides(flags)) {
    tabmia::update_run_config(resolve_config(flags, /*allow_echo=*/true),
                              run_dir);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy audit for diffusion models on tabular data"};
  app.require_subcommand(1);

  Flags flags;
  auto* prepare = app.add_subcommand(
      "prepare", "Split the table and fit the encoder");
  auto* train = app.add_subcommand("train", "Train the denoiser on members");
  auto* sample = app.add_subcommand("sample", "Generate synthetic rows");
  auto* attack = app.add_subcommand("attack", "Run the membership attacks");
  auto* report = app.add_subcommand("report", "Write metrics and curve files");
  auto* all = app.add_subcommand("all", "Run every stage in order");
  for (auto* cmd : {prepare, train, sample, attack, report, all}) {
    add_common_flags(cmd, flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    const auto run_dir = require_run_dir(flags);
    if (prepare->parsed()) {
      tabmia::cmd_prepare(resolve_config(flags, /*allow_echo=*/false),
                          run_dir);
    } else if (train->parsed()) {
      sync_echo(flags, run_dir);
      tabmia::cmd_train(run_dir);
    } else if (sample->parsed()) {
      sync_echo(flags, run_dir);
      tabmia::cmd_sample(run_dir);
    } else if (attack->parsed()) {
      sync_echo(flags, run_dir);
      tabmia::cmd_attack(run_dir);
    } else if (report->parsed()) {
      sync_echo(flags, run_dir);
      tabmia::cmd_report(run_dir);
    } else if (all->parsed()) {
      tabmia::cmd_all(resolve_config(flags, /*allow_echo=*/false), run_dir);
    }
  } catch (const tabmia::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const tabmia::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const tabmia::MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingArtifact;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
