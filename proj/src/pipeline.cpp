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

#include "tabmia/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "tabmia/attack_net.hpp"
#include "tabmia/checkpoint.hpp"
#include "tabmia/dataset.hpp"
#include "tabmia/denoiser.hpp"
#include "tabmia/errors.hpp"
#include "tabmia/eval.hpp"
#include "tabmia/format.hpp"
#include "tabmia/rng.hpp"
#include "tabmia/secmi.hpp"

namespace tabmia {

namespace fs = std::filesystem;

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kStat:
      return "stat";
    case AttackKind::kNn:
      return "nn";
    default:
      return "both";
  }
}

AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "stat") return AttackKind::kStat;
  if (name == "nn") return AttackKind::kNn;
  if (name == "both") return AttackKind::kBoth;
  throw ValidationError("unknown attack kind '" + name + "'");
}

void RunConfig::validate() const {
  if (data_csv.empty() || schema_path.empty()) {
    throw ValidationError("config must name data_csv and schema paths");
  }
  if (!fs::exists(data_csv)) {
    throw ValidationError("data file does not exist: " + data_csv);
  }
  if (!fs::exists(schema_path)) {
    throw ValidationError("schema file does not exist: " + schema_path);
  }
  if (!(member_fraction > 0.0 && member_fraction < 1.0)) {
    throw ValidationError("member_fraction must lie strictly in (0, 1)");
  }
  if (subsample_n < 0) throw ValidationError("subsample_n must be >= 0");
  if (timesteps < 2) throw ValidationError("timesteps must be at least 2");
  if (attack_t < 1 || attack_t > timesteps - 1) {
    throw ValidationError("attack timestep must lie in [1, timesteps - 1]");
  }
  schedule_kind_from_string(schedule_kind);
  denoiser_train.validate();
  if (latent) autoencoder_train.validate();
  nn_train.validate();
  for (double target : fpr_targets) {
    if (!(target > 0.0 && target <= 1.0)) {
      throw ValidationError("fpr_targets entries must lie in (0, 1]");
    }
  }
  if (!(stat_calibration_fraction > 0.0 && stat_calibration_fraction < 1.0) ||
      !(nn_train_fraction > 0.0 && nn_train_fraction < 1.0)) {
    throw ValidationError("attack split fractions must lie in (0, 1)");
  }
  if (ratio_t_step < 1 || ratio_t_start < 1 || ratio_t_stop < ratio_t_start) {
    throw ValidationError("invalid ratio timestep sweep bounds");
  }
  if (n_samples < 0) throw ValidationError("n_samples must be >= 0");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json doc;
  doc["data_csv"] = data_csv;
  doc["schema"] = schema_path;
  doc["member_fraction"] = member_fraction;
  doc["subsample_n"] = subsample_n;
  doc["include_categorical"] = include_categorical;
  doc["seed"] = seed;
  doc["schedule"] = {{"kind", schedule_kind},
                     {"timesteps", timesteps},
                     {"beta_start", beta_start},
                     {"beta_end", beta_end},
                     {"s", cosine_s}};
  doc["denoiser"] = {{"hidden", hidden_dims},
                     {"embed_dim", embed_dim},
                     {"train", denoiser_train.to_json()}};
  doc["latent"] = {{"enabled", latent},
                   {"latent_dim", autoencoder.latent_dim},
                   {"hidden_dim", autoencoder.hidden_dim},
                   {"activation", to_string(autoencoder.activation)},
                   {"train", autoencoder_train.to_json()}};
  doc["attack"] = {{"kind", to_string(attack)},
                   {"t", attack_t},
                   {"stat_calibration_fraction", stat_calibration_fraction},
                   {"nn_train_fraction", nn_train_fraction},
                   {"literal_step_indexing", literal_step_indexing},
                   {"nn", {{"channels", nn_channels},
                           {"blocks", nn_blocks},
                           {"train", nn_train.to_json()}}}};
  doc["report"] = {{"fpr_targets", fpr_targets},
                   {"ratio_timesteps", {{"start", ratio_t_start},
                                        {"stop", ratio_t_stop},
                                        {"step", ratio_t_step}}}};
  doc["n_samples"] = n_samples;
  return doc;
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  RunConfig cfg;
  cfg.data_csv = doc.value("data_csv", cfg.data_csv);
  cfg.schema_path = doc.value("schema", cfg.schema_path);
  cfg.member_fraction = doc.value("member_fraction", cfg.member_fraction);
  cfg.subsample_n = doc.value("subsample_n", cfg.subsample_n);
  cfg.include_categorical =
      doc.value("include_categorical", cfg.include_categorical);
  cfg.seed = doc.value("seed", cfg.seed);
  if (doc.contains("schedule")) {
    const auto& sched = doc["schedule"];
    cfg.schedule_kind = sched.value("kind", cfg.schedule_kind);
    cfg.timesteps = sched.value("timesteps", cfg.timesteps);
    cfg.beta_start = sched.value("beta_start", cfg.beta_start);
    cfg.beta_end = sched.value("beta_end", cfg.beta_end);
    cfg.cosine_s = sched.value("s", cfg.cosine_s);
  }
  if (doc.contains("denoiser")) {
    const auto& den = doc["denoiser"];
    cfg.hidden_dims = den.value("hidden", cfg.hidden_dims);
    cfg.embed_dim = den.value("embed_dim", cfg.embed_dim);
    if (den.contains("train")) {
      cfg.denoiser_train = TrainConfig::from_json(den["train"]);
    }
  }
  if (doc.contains("latent")) {
    const auto& lat = doc["latent"];
    cfg.latent = lat.value("enabled", cfg.latent);
    cfg.autoencoder.latent_dim =
        lat.value("latent_dim", cfg.autoencoder.latent_dim);
    cfg.autoencoder.hidden_dim =
        lat.value("hidden_dim", cfg.autoencoder.hidden_dim);
    if (lat.contains("activation")) {
      cfg.autoencoder.activation = activation_from_string(lat["activation"]);
    }
    if (lat.contains("train")) {
      cfg.autoencoder_train = TrainConfig::from_json(lat["train"]);
    }
  }
  if (doc.contains("attack")) {
    const auto& atk = doc["attack"];
    if (atk.contains("kind")) {
      cfg.attack = attack_kind_from_string(atk["kind"]);
    }
    cfg.attack_t = atk.value("t", cfg.attack_t);
    cfg.stat_calibration_fraction =
        atk.value("stat_calibration_fraction", cfg.stat_calibration_fraction);
    cfg.nn_train_fraction =
        atk.value("nn_train_fraction", cfg.nn_train_fraction);
    cfg.literal_step_indexing =
        atk.value("literal_step_indexing", cfg.literal_step_indexing);
    if (atk.contains("nn")) {
      const auto& nn = atk["nn"];
      cfg.nn_channels = nn.value("channels", cfg.nn_channels);
      cfg.nn_blocks = nn.value("blocks", cfg.nn_blocks);
      if (nn.contains("train")) {
        cfg.nn_train = TrainConfig::from_json(nn["train"]);
      }
    }
  }
  if (doc.contains("report")) {
    const auto& rep = doc["report"];
    cfg.fpr_targets = rep.value("fpr_targets", cfg.fpr_targets);
    if (rep.contains("ratio_timesteps")) {
      const auto& sweep = rep["ratio_timesteps"];
      cfg.ratio_t_start = sweep.value("start", cfg.ratio_t_start);
      cfg.ratio_t_stop = sweep.value("stop", cfg.ratio_t_stop);
      cfg.ratio_t_step = sweep.value("step", cfg.ratio_t_step);
    }
  }
  cfg.n_samples = doc.value("n_samples", cfg.n_samples);
  return cfg;
}

RunConfig RunConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file " + path.string() +
                          " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

namespace {

struct Paths {
  fs::path run_dir;
  fs::path config() const { return run_dir / "config.json"; }
  fs::path lock() const { return run_dir / "lock"; }
  fs::path prepare() const { return run_dir / "prepare"; }
  fs::path split() const { return prepare() / "split.json"; }
  fs::path table_rows() const { return prepare() / "table_rows.json"; }
  fs::path transform() const { return prepare() / "transform.json"; }
  fs::path member_bin() const { return prepare() / "member.bin"; }
  fs::path member_meta() const { return prepare() / "member.meta.json"; }
  fs::path nonmember_bin() const { return prepare() / "nonmember.bin"; }
  fs::path nonmember_meta() const {
    return prepare() / "nonmember.meta.json";
  }
  fs::path train() const { return run_dir / "train"; }
  fs::path denoiser() const { return train() / "denoiser"; }
  fs::path autoencoder() const { return train() / "autoencoder"; }
  fs::path loss_trace() const { return train() / "loss_trace.csv"; }
  fs::path sample() const { return run_dir / "sample"; }
  fs::path synthetic_csv() const { return sample() / "synthetic.csv"; }
  fs::path synthetic_bin() const { return sample() / "synthetic_encoded.bin"; }
  fs::path synthetic_meta() const {
    return sample() / "synthetic_encoded.meta.json";
  }
  fs::path attack() const { return run_dir / "attack"; }
  fs::path terrors_csv() const { return attack() / "terrors.csv"; }
  fs::path terrors_meta() const { return attack() / "terrors.meta.json"; }
  fs::path stat_result() const { return attack() / "stat_result.json"; }
  fs::path attack_net() const { return attack() / "attack_net"; }
  fs::path nn_scores() const { return attack() / "nn_scores.csv"; }
  fs::path report() const { return run_dir / "report"; }
};

// One writer per run directory at a time.
class RunLock {
 public:
  explicit RunLock(const Paths& paths) : path_(paths.lock()) {
    std::FILE* handle = std::fopen(path_.c_str(), "wx");
    if (handle == nullptr) {
      throw ValidationError("run directory is locked by another process: " +
                            path_.string());
    }
    std::fclose(handle);
  }
  ~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
};

void write_json_file(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

nlohmann::json read_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw MissingArtifactError(std::string(what) + " not found: " +
                               path.string() + " (run the earlier stage)");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("corrupt JSON in " + path.string() + ": " + e.what());
  }
  return doc;
}

void write_encoded(const fs::path& bin, const fs::path& meta,
                   const Eigen::MatrixXd& matrix) {
  write_matrix_le(bin, matrix);
  write_json_file(meta, nlohmann::json{{"rows", matrix.rows()},
                                       {"cols", matrix.cols()}});
}

Eigen::MatrixXd read_encoded(const fs::path& bin, const fs::path& meta,
                             const char* what) {
  const auto doc = read_json_file(meta, what);
  if (!fs::exists(bin)) {
    throw MissingArtifactError(std::string(what) + " not found: " +
                               bin.string());
  }
  return read_matrix_le(bin, doc.at("rows"), doc.at("cols"));
}

struct PreparedData {
  RunConfig config;
  EncodeTransform transform;
  Eigen::MatrixXd member;
  Eigen::MatrixXd nonmember;
  SplitAssignment split;
};

PreparedData load_prepared(const Paths& paths, const RunConfig& config) {
  PreparedData data;
  data.config = config;
  data.transform =
      EncodeTransform::from_json(read_json_file(paths.transform(),
                                                "fitted transform"));
  data.member = read_encoded(paths.member_bin(), paths.member_meta(),
                             "encoded member matrix");
  data.nonmember = read_encoded(paths.nonmember_bin(), paths.nonmember_meta(),
                                "encoded non-member matrix");
  data.split =
      SplitAssignment::from_json(read_json_file(paths.split(), "split"));
  return data;
}

NoiseSchedule build_schedule(const RunConfig& config) {
  if (schedule_kind_from_string(config.schedule_kind) ==
      ScheduleKind::kLinear) {
    return NoiseSchedule::linear(config.timesteps, config.beta_start,
                                 config.beta_end);
  }
  return NoiseSchedule::cosine(config.timesteps, config.cosine_s);
}

std::string membership_name(Membership label) {
  return label == Membership::kMember ? "member" : "nonmember";
}

// Rows the attack operates on: members first, then non-members, in split
// order, together with their source-table row ids.
struct AttackRows {
  Eigen::MatrixXd rows;  // attack space (data encoding, or latents)
  std::vector<Membership> labels;
  std::vector<int64_t> row_ids;
  std::vector<int> column_map;
  std::vector<std::string> column_names;
};

AttackRows build_attack_rows(const PreparedData& prepared,
                             const Autoencoder* autoencoder) {
  AttackRows out;
  const int64_t n_member = prepared.member.rows();
  const int64_t n_nonmember = prepared.nonmember.rows();
  Eigen::MatrixXd combined(n_member + n_nonmember, prepared.member.cols());
  combined.topRows(n_member) = prepared.member;
  combined.bottomRows(n_nonmember) = prepared.nonmember;
  out.labels.assign(static_cast<size_t>(n_member), Membership::kMember);
  out.labels.insert(out.labels.end(), static_cast<size_t>(n_nonmember),
                    Membership::kNonmember);
  out.row_ids = prepared.split.member_indices;
  out.row_ids.insert(out.row_ids.end(),
                     prepared.split.nonmember_indices.begin(),
                     prepared.split.nonmember_indices.end());
  if (autoencoder != nullptr) {
    out.rows = autoencoder->encode(combined);
    for (int c = 0; c < out.rows.cols(); ++c) {
      out.column_map.push_back(c);
      out.column_names.push_back("z" + std::to_string(c));
    }
  } else {
    out.rows = std::move(combined);
    out.column_map = prepared.transform.column_map();
    out.column_names = prepared.transform.encoded_column_names();
  }
  return out;
}

std::vector<int> ratio_sweep_timesteps(const RunConfig& config) {
  std::vector<int> sweep;
  for (int t = config.ratio_t_start; t <= config.ratio_t_stop;
       t += config.ratio_t_step) {
    if (t >= 1 && t <= config.timesteps - 1) sweep.push_back(t);
  }
  return sweep;
}

nlohmann::json seeds_json(const RunConfig& config) {
  return nlohmann::json{
      {"master", config.seed},
      {"subsample", derive_seed(config.seed, "subsample")},
      {"split", derive_seed(config.seed, "split")},
      {"denoiser_train", derive_seed(config.seed, "denoiser.train")},
      {"autoencoder_train", derive_seed(config.seed, "autoencoder.train")},
      {"sample", derive_seed(config.seed, "sample")},
      {"stat_attack", derive_seed(config.seed, "attack.stat")},
      {"nn_attack", derive_seed(config.seed, "attack.nn")},
      {"dcr_subsample", derive_seed(config.seed, "report.dcr")}};
}

}  // namespace

RunConfig load_run_config(const fs::path& run_dir) {
  const Paths paths{run_dir};
  return RunConfig::from_json(
      read_json_file(paths.config(), "run configuration"));
}

void update_run_config(const RunConfig& config, const fs::path& run_dir) {
  const Paths paths{run_dir};
  fs::create_directories(run_dir);
  write_json_file(paths.config(), config.to_json());
}

void cmd_prepare(const RunConfig& config, const fs::path& run_dir) {
  config.validate();
  const Paths paths{run_dir};
  fs::create_directories(run_dir);
  RunLock lock(paths);
  fs::create_directories(paths.prepare());

  const auto schema = TableSchema::from_json_file(config.schema_path);
  Dataset table = load_table(config.data_csv, schema);
  std::vector<int64_t> kept_rows(table.n_rows());
  std::iota(kept_rows.begin(), kept_rows.end(), 0);
  if (config.subsample_n > 0) {
    kept_rows = subsample_indices(table.n_rows(), config.subsample_n,
                                  derive_seed(config.seed, "subsample"));
    table = table.select_rows(kept_rows);
  }

  const auto split = split_members(table, config.member_fraction,
                                   derive_seed(config.seed, "split"));
  const Dataset member_rows = table.select_rows(split.member_indices);
  const Dataset nonmember_rows = table.select_rows(split.nonmember_indices);

  // Normalization statistics are fitted on members only; non-members are
  // encoded with the member-fitted transform.
  const EncodedMatrix member = fit_encode(member_rows,
                                          config.include_categorical);
  const EncodedMatrix nonmember = apply_encode(member.transform,
                                               nonmember_rows);

  write_json_file(paths.config(), config.to_json());
  write_json_file(paths.split(), split.to_json());
  write_json_file(paths.table_rows(),
                  nlohmann::json{{"source_rows", kept_rows},
                                 {"subsample_n", config.subsample_n}});
  write_json_file(paths.transform(), member.transform.to_json());
  write_encoded(paths.member_bin(), paths.member_meta(), member.values);
  write_encoded(paths.nonmember_bin(), paths.nonmember_meta(),
                nonmember.values);
  std::cerr << "prepare: " << member.values.rows() << " member / "
            << nonmember.values.rows() << " non-member rows, "
            << member.values.cols() << " encoded dims\n";
}

void cmd_train(const fs::path& run_dir) {
  const RunConfig config = load_run_config(run_dir);
  const Paths paths{run_dir};
  RunLock lock(paths);
  const PreparedData prepared = load_prepared(paths, config);
  fs::create_directories(paths.train());

  const std::string transform_fp = file_fingerprint(paths.transform());
  const std::string schema_fp = prepared.transform.schema().fingerprint();
  nlohmann::json provenance{{"transform_fingerprint", transform_fp},
                            {"schema_fingerprint", schema_fp}};

  Eigen::MatrixXd train_rows = prepared.member;
  if (config.latent) {
    TrainConfig ae_train = config.autoencoder_train;
    ae_train.seed = derive_seed(config.seed, "autoencoder.train");
    AutoencoderConfig ae_config = config.autoencoder;
    if (ae_config.latent_dim <= 0) {
      ae_config.latent_dim = static_cast<int>(prepared.member.cols());
    }
    const Autoencoder autoencoder =
        fit_autoencoder(prepared.member, ae_config, ae_train);
    save_autoencoder(paths.autoencoder(), autoencoder, provenance);
    train_rows = autoencoder.encode(prepared.member);
    std::cerr << "train: autoencoder reconstruction mse "
              << autoencoder.training_reconstruction_error() << "\n";
  }

  TrainConfig den_train = config.denoiser_train;
  den_train.seed = derive_seed(config.seed, "denoiser.train");
  Denoiser model(static_cast<int>(train_rows.cols()), config.hidden_dims,
                 config.embed_dim, derive_seed(den_train.seed, "init"),
                 build_schedule(config));
  const auto result = train_denoiser(model, train_rows, den_train);

  nlohmann::json manifest = provenance;
  manifest["train_config"] = den_train.to_json();
  manifest["epochs_ran"] = result.epoch_loss.size();
  manifest["steps_ran"] = result.steps;
  manifest["stopped_by_max_steps"] = result.stopped_by_max_steps;
  manifest["latent"] = config.latent;
  save_denoiser(paths.denoiser(), model, manifest);

  std::ofstream trace(paths.loss_trace());
  if (!trace) {
    throw ValidationError("cannot write " + paths.loss_trace().string());
  }
  trace << "epoch,mean_loss\n";
  for (size_t epoch = 0; epoch < result.epoch_loss.size(); ++epoch) {
    trace << epoch << "," << format_double(result.epoch_loss[epoch]) << "\n";
  }
  std::cerr << "train: " << result.steps << " steps, final epoch loss "
            << (result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back())
            << "\n";
}

void cmd_sample(const fs::path& run_dir) {
  const RunConfig config = load_run_config(run_dir);
  const Paths paths{run_dir};
  RunLock lock(paths);
  const PreparedData prepared = load_prepared(paths, config);
  if (!fs::exists(paths.denoiser() / "manifest.json")) {
    throw MissingArtifactError("denoiser checkpoint not found in " +
                               paths.denoiser().string() +
                               " (run the train stage)");
  }
  const Denoiser model = load_denoiser(paths.denoiser());
  fs::create_directories(paths.sample());

  Eigen::MatrixXd rows =
      sample_rows(model, config.n_samples, derive_seed(config.seed, "sample"));
  if (config.latent) {
    const Autoencoder autoencoder = load_autoencoder(paths.autoencoder());
    rows = autoencoder.decode(rows);
  }
  write_encoded(paths.synthetic_bin(), paths.synthetic_meta(), rows);
  write_table_csv(decode_rows(prepared.transform, rows),
                  paths.synthetic_csv());
  std::cerr << "sample: wrote " << rows.rows() << " synthetic rows\n";
}

void cmd_attack(const fs::path& run_dir) {
  const RunConfig config = load_run_config(run_dir);
  const Paths paths{run_dir};
  RunLock lock(paths);
  const PreparedData prepared = load_prepared(paths, config);
  if (!fs::exists(paths.denoiser() / "manifest.json")) {
    throw MissingArtifactError("denoiser checkpoint not found in " +
                               paths.denoiser().string() +
                               " (run the train stage)");
  }
  const Denoiser model = load_denoiser(paths.denoiser());

  // Refuse to attack a model trained against different prepare artifacts.
  const auto manifest =
      read_json_file(paths.denoiser() / "manifest.json", "denoiser manifest");
  const std::string transform_fp = file_fingerprint(paths.transform());
  if (manifest.value("transform_fingerprint", "") != transform_fp) {
    throw ValidationError(
        "denoiser checkpoint was trained against different prepare "
        "artifacts (transform fingerprint mismatch)");
  }

  std::optional<Autoencoder> autoencoder;
  if (config.latent) {
    autoencoder = load_autoencoder(paths.autoencoder());
  }
  const AttackRows attack_rows =
      build_attack_rows(prepared, autoencoder ? &*autoencoder : nullptr);

  const TErrorMatrix errors = t_error_matrix(
      model, attack_rows.rows, attack_rows.labels, config.attack_t,
      model.schedule(), attack_rows.column_map, attack_rows.column_names,
      config.literal_step_indexing);

  fs::create_directories(paths.attack());
  {
    std::ofstream out(paths.terrors_csv());
    if (!out) {
      throw ValidationError("cannot write " + paths.terrors_csv().string());
    }
    out << "row_id,label";
    for (int d = 0; d < errors.errors.cols(); ++d) out << ",e_" << d;
    out << "\n";
    for (int64_t r = 0; r < errors.n_rows(); ++r) {
      out << attack_rows.row_ids[static_cast<size_t>(r)] << ","
          << membership_name(errors.labels[static_cast<size_t>(r)]);
      for (int d = 0; d < errors.errors.cols(); ++d) {
        out << "," << format_double(errors.errors(r, d));
      }
      out << "\n";
    }
  }
  write_json_file(
      paths.terrors_meta(),
      nlohmann::json{{"t", errors.t},
                     {"denoiser_fingerprint",
                      checkpoint_fingerprint(paths.denoiser())},
                     {"latent", config.latent},
                     {"literal_step_indexing", config.literal_step_indexing},
                     {"column_map", errors.column_map},
                     {"column_names", errors.column_names},
                     {"row_ids", attack_rows.row_ids}});

  if (config.attack == AttackKind::kStat || config.attack == AttackKind::kBoth) {
    const auto result = stat_attack(errors, config.stat_calibration_fraction,
                                    derive_seed(config.seed, "attack.stat"));
    nlohmann::json doc;
    doc["threshold"] = result.threshold;
    doc["calibration_balanced_accuracy"] =
        result.calibration_balanced_accuracy;
    doc["calibration_fraction"] = result.calibration_fraction;
    doc["seed"] = result.seed;
    doc["calibration_rows"] = result.calibration_rows;
    doc["heldout_rows"] = result.heldout_rows;
    std::vector<std::string> predictions;
    for (const auto p : result.heldout_predictions) {
      predictions.push_back(membership_name(p));
    }
    doc["heldout_predictions"] = std::move(predictions);
    doc["scores"] = std::vector<double>(
        result.scores.data(), result.scores.data() + result.scores.size());
    write_json_file(paths.stat_result(), doc);
    std::cerr << "attack: stat threshold " << result.threshold << "\n";
  }

  if (config.attack == AttackKind::kNn || config.attack == AttackKind::kBoth) {
    TrainConfig nn_train = config.nn_train;
    nn_train.seed = derive_seed(config.seed, "attack.nn");
    const AttackNetConfig net_config{config.nn_channels, config.nn_blocks};
    const auto result =
        nn_attack_train(errors, config.nn_train_fraction, nn_train,
                        net_config);
    save_attack_net(paths.attack_net(), result.net,
                    nlohmann::json{{"t", errors.t},
                                   {"train_config", nn_train.to_json()}});
    std::ofstream out(paths.nn_scores());
    if (!out) {
      throw ValidationError("cannot write " + paths.nn_scores().string());
    }
    // Held-out rows carry the evaluation scores; training rows are scored
    // too (inference mode) for completeness.
    const Eigen::VectorXd all_scores = result.net.score(errors.errors);
    std::vector<bool> is_train(static_cast<size_t>(errors.n_rows()), false);
    for (int64_t row : result.train_rows) {
      is_train[static_cast<size_t>(row)] = true;
    }
    out << "row_id,label,split,score\n";
    for (int64_t r = 0; r < errors.n_rows(); ++r) {
      out << attack_rows.row_ids[static_cast<size_t>(r)] << ","
          << membership_name(errors.labels[static_cast<size_t>(r)]) << ","
          << (is_train[static_cast<size_t>(r)] ? "train" : "heldout") << ","
          << format_double(all_scores[r]) << "\n";
    }
    std::cerr << "attack: scorer trained on " << result.train_rows.size()
              << " rows, " << result.heldout_rows.size() << " held out\n";
  }
}

void cmd_report(const fs::path& run_dir) {
  const RunConfig config = load_run_config(run_dir);
  const Paths paths{run_dir};
  RunLock lock(paths);
  const PreparedData prepared = load_prepared(paths, config);
  if (!fs::exists(paths.terrors_meta())) {
    throw MissingArtifactError("attack artifacts not found in " +
                               paths.attack().string() +
                               " (run the attack stage)");
  }
  const Denoiser model = load_denoiser(paths.denoiser());
  std::optional<Autoencoder> autoencoder;
  if (config.latent) {
    autoencoder = load_autoencoder(paths.autoencoder());
  }
  const AttackRows attack_rows =
      build_attack_rows(prepared, autoencoder ? &*autoencoder : nullptr);

  nlohmann::json metrics;
  metrics["format_version"] = 1;
  metrics["config"] = config.to_json();
  metrics["seeds"] = seeds_json(config);
  metrics["assumptions"] = {
      {"timesteps", config.timesteps},
      {"normalization_fit", "members_only"},
      {"epoch_unit", "full_passes"},
  };
  nlohmann::json checkpoints;
  checkpoints["denoiser"] = checkpoint_fingerprint(paths.denoiser());
  if (config.latent) {
    checkpoints["autoencoder"] = checkpoint_fingerprint(paths.autoencoder());
  }
  if (fs::exists(paths.attack_net() / "manifest.json")) {
    checkpoints["attack_net"] = checkpoint_fingerprint(paths.attack_net());
  }
  metrics["checkpoints"] = std::move(checkpoints);

  ReportBundle bundle;
  nlohmann::json attacks;

  if (fs::exists(paths.stat_result())) {
    const auto doc = read_json_file(paths.stat_result(), "stat attack result");
    const auto score_values = doc.at("scores").get<std::vector<double>>();
    const Eigen::VectorXd scores = Eigen::Map<const Eigen::VectorXd>(
        score_values.data(), static_cast<Eigen::Index>(score_values.size()));
    const RocReport stat_roc =
        roc(scores, attack_rows.labels, /*higher_is_member=*/false,
            config.fpr_targets);
    attacks["stat"] = roc_summary_json(stat_roc);
    attacks["stat"]["threshold"] = doc.at("threshold");
    attacks["stat"]["calibration_balanced_accuracy"] =
        doc.at("calibration_balanced_accuracy");
    bundle.roc_stat = stat_roc;
  }

  if (fs::exists(paths.nn_scores())) {
    // Evaluate on held-out rows only.
    std::ifstream in(paths.nn_scores());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> scores;
    std::vector<Membership> labels;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> fields;
      size_t pos = 0;
      while (true) {
        const size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (fields.size() != 4 || fields[2] != "heldout") continue;
      labels.push_back(fields[1] == "member" ? Membership::kMember
                                             : Membership::kNonmember);
      scores.push_back(parse_double(fields[3]).value());
    }
    const Eigen::VectorXd held = Eigen::Map<const Eigen::VectorXd>(
        scores.data(), static_cast<Eigen::Index>(scores.size()));
    const RocReport nn_roc =
        roc(held, labels, /*higher_is_member=*/true, config.fpr_targets);
    attacks["nn"] = roc_summary_json(nn_roc);
    bundle.roc_primary = nn_roc;
    metrics["roc_csv_attack"] = "nn";
  }
  if (!bundle.roc_primary && bundle.roc_stat) {
    bundle.roc_primary = bundle.roc_stat;
    bundle.roc_stat.reset();
    metrics["roc_csv_attack"] = "stat";
  }
  if (bundle.roc_primary) {
    metrics["auc"] = bundle.roc_primary->auc;
    metrics["tpr_at"] = roc_summary_json(*bundle.roc_primary)["tpr_at"];
  }
  metrics["attacks"] = std::move(attacks);

  // t-error ratio sweep over the configured timesteps.
  const std::vector<int> sweep_t = ratio_sweep_timesteps(config);
  if (!sweep_t.empty()) {
    TErrorSweep sweep(model, attack_rows.rows, attack_rows.labels,
                      model.schedule(), attack_rows.column_map,
                      attack_rows.column_names,
                      config.literal_step_indexing);
    std::vector<TErrorMatrix> matrices;
    matrices.reserve(sweep_t.size());
    for (int t : sweep_t) matrices.push_back(sweep.at(t));
    bundle.ratios = ratio_report(matrices);
    metrics["ratio"] = {{"timesteps", sweep_t},
                        {"column_names", bundle.ratios->column_names}};
  }

  if (fs::exists(paths.synthetic_bin())) {
    const Eigen::MatrixXd synthetic = read_encoded(
        paths.synthetic_bin(), paths.synthetic_meta(), "synthetic rows");
    bundle.dcr_report = dcr(synthetic, prepared.member, prepared.nonmember,
                            derive_seed(config.seed, "report.dcr"));
    metrics["dcr_score"] = bundle.dcr_report->dcr_score;
  }

  bundle.metrics = &metrics;
  emit_reports(bundle, paths.report());
  std::cerr << "report: wrote " << paths.report().string() << "\n";
}

void cmd_all(const RunConfig& config, const fs::path& run_dir) {
  cmd_prepare(config, run_dir);
  cmd_train(run_dir);
  cmd_sample(run_dir);
  cmd_attack(run_dir);
  cmd_report(run_dir);
}

}  // namespace tabmia
