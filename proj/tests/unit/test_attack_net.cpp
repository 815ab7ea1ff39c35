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

#include <cmath>
#include <filesystem>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "stubs.hpp"
#include "tabmia/attack_net.hpp"
#include "tabmia/errors.hpp"
#include "tabmia/rng.hpp"

using namespace tabmia;
using tabmia::testing::auc_pairwise;

namespace {

TErrorMatrix toy_matrix(const Eigen::MatrixXd& errors,
                        const std::vector<Membership>& labels, int t = 50) {
  TErrorMatrix matrix;
  matrix.t = t;
  matrix.errors = errors;
  matrix.labels = labels;
  for (int c = 0; c < errors.cols(); ++c) {
    matrix.column_map.push_back(c);
    matrix.column_names.push_back("c" + std::to_string(c));
    matrix.column_ids.push_back(c);
  }
  return matrix;
}

}  // namespace

TEST_CASE("attack net gradients match central finite differences") {
  Rng rng(91);
  AttackNetConfig config;
  config.channels = 3;
  config.blocks = 1;
  AttackNet net(4, config, 12);
  Eigen::MatrixXd errors(3, 4);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) errors(r, c) = std::abs(rng.normal());
  }
  const std::vector<Membership> labels{
      Membership::kMember, Membership::kNonmember, Membership::kMember};

  Eigen::VectorXd grads(net.n_params());
  const Eigen::VectorXd saved_running = net.running_stats();
  net.train_step_loss(errors, labels, grads, /*update_running=*/false);
  CHECK(net.running_stats() == saved_running);

  Eigen::VectorXd scratch(net.n_params());
  const auto numeric_at = [&](int64_t k, double step) {
    const double saved = net.parameters()[k];
    net.parameters()[k] = saved + step;
    const double up = net.train_step_loss(errors, labels, scratch, false);
    net.parameters()[k] = saved - step;
    const double down = net.train_step_loss(errors, labels, scratch, false);
    net.parameters()[k] = saved;
    return (up - down) / (2.0 * step);
  };
  for (int64_t k = 0; k < net.n_params(); ++k) {
    double numeric = numeric_at(k, 1e-5);
    double scale = std::max({std::abs(numeric), std::abs(grads[k]), 1e-8});
    if (std::abs(numeric - grads[k]) / scale >= 1e-4) {
      // A perturbation this size can push a pre-activation across the ReLU
      // kink, where central differences misreport the slope. Shrinking the
      // step resolves a kink crossing but not a wrong gradient.
      numeric = numeric_at(k, 1e-7);
      scale = std::max({std::abs(numeric), std::abs(grads[k]), 1e-8});
    }
    CHECK(std::abs(numeric - grads[k]) / scale < 1e-4);
  }
}

TEST_CASE("inference is batch-size invariant") {
  AttackNetConfig config;
  config.channels = 5;
  config.blocks = 2;
  AttackNet net(6, config, 3);
  Rng rng(8);
  Eigen::MatrixXd errors(7, 6);
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 6; ++c) errors(r, c) = std::abs(rng.normal());
  }
  // Burn in some running statistics so inference is not at the init values.
  Eigen::VectorXd grads(net.n_params());
  const auto labels = tabmia::testing::labels_of({1, 0, 1, 0, 1, 0, 1});
  for (int i = 0; i < 5; ++i) net.train_step_loss(errors, labels, grads);

  const Eigen::VectorXd batched = net.score(errors);
  for (int r = 0; r < 7; ++r) {
    const Eigen::VectorXd single = net.score(errors.row(r));
    CHECK(single.size() == 1);
    CHECK(single[0] == batched[r]);
  }
  // Repeated calls agree bit-exactly.
  CHECK(net.score(errors) == batched);
}

TEST_CASE("zeroed head yields one constant score") {
  AttackNet net(5, AttackNetConfig{4, 1}, 2);
  // head.weight and head.bias are the last two parameter blocks.
  const auto& layout = net.parameter_layout();
  const auto& head_w = layout[layout.size() - 2];
  REQUIRE(head_w.name == "head.weight");
  net.parameters().segment(head_w.offset, head_w.size()).setZero();
  Rng rng(4);
  Eigen::MatrixXd errors(6, 5);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 5; ++c) errors(r, c) = std::abs(rng.normal());
  }
  const Eigen::VectorXd scores = net.score(errors);
  for (int r = 1; r < 6; ++r) CHECK(scores[r] == scores[0]);
}

TEST_CASE("training separates a perfectly separable toy set") {
  // Members: all-zeros rows. Non-members: all-ones rows.
  const int n = 120;
  Eigen::MatrixXd errors(n, 8);
  std::vector<Membership> labels;
  for (int r = 0; r < n; ++r) {
    const bool member = r % 2 == 0;
    errors.row(r).setConstant(member ? 0.0 : 1.0);
    labels.push_back(member ? Membership::kMember : Membership::kNonmember);
  }
  TrainConfig train;
  train.batch_size = 24;
  train.epochs = 60;
  train.learning_rate = 1e-2;
  train.seed = 5;
  const auto result = nn_attack_train(toy_matrix(errors, labels), 0.2, train,
                                      AttackNetConfig{8, 2});
  CHECK(auc_pairwise(result.heldout_scores, result.heldout_labels, true) ==
        1.0);
}

TEST_CASE("shuffled labels give chance-level held-out performance") {
  Rng rng(13);
  const int n = 200;
  Eigen::MatrixXd errors(n, 6);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < 6; ++c) errors(r, c) = std::abs(rng.normal());
  }
  double auc_sum = 0.0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<Membership> labels;
    Rng label_rng(seed * 100);
    for (int r = 0; r < n; ++r) {
      labels.push_back(label_rng.uniform() < 0.5 ? Membership::kMember
                                                 : Membership::kNonmember);
    }
    labels[0] = Membership::kMember;
    labels[1] = Membership::kNonmember;
    TrainConfig train;
    train.batch_size = 20;
    train.epochs = 30;
    train.seed = seed;
    const auto result = nn_attack_train(toy_matrix(errors, labels), 0.2,
                                        train, AttackNetConfig{4, 1});
    auc_sum +=
        auc_pairwise(result.heldout_scores, result.heldout_labels, true);
  }
  const double mean_auc = auc_sum / 5.0;
  CHECK(mean_auc > 0.4);
  CHECK(mean_auc < 0.6);
}

TEST_CASE("attack training is deterministic given the seed") {
  Rng rng(19);
  const int n = 60;
  Eigen::MatrixXd errors(n, 4);
  std::vector<Membership> labels;
  for (int r = 0; r < n; ++r) {
    const bool member = r % 3 != 0;
    for (int c = 0; c < 4; ++c) {
      errors(r, c) = std::abs(rng.normal()) * (member ? 0.5 : 1.0);
    }
    labels.push_back(member ? Membership::kMember : Membership::kNonmember);
  }
  TrainConfig train;
  train.batch_size = 16;
  train.epochs = 8;
  train.seed = 77;
  const auto matrix = toy_matrix(errors, labels);
  const auto a = nn_attack_train(matrix, 0.3, train, AttackNetConfig{4, 1});
  const auto b = nn_attack_train(matrix, 0.3, train, AttackNetConfig{4, 1});
  CHECK(a.heldout_scores == b.heldout_scores);
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.net.parameters() == b.net.parameters());
}

TEST_CASE("attack training rejects single-class training splits") {
  Eigen::MatrixXd errors(10, 2);
  errors.setOnes();
  const std::vector<Membership> labels(10, Membership::kMember);
  TrainConfig train;
  train.epochs = 1;
  train.seed = 1;
  CHECK_THROWS_AS(nn_attack_train(toy_matrix(errors, labels), 0.2, train,
                                  AttackNetConfig{2, 1}),
                  ValidationError);
}

TEST_CASE("attack net width must match its input") {
  AttackNet net(5, AttackNetConfig{4, 1}, 2);
  Eigen::MatrixXd wrong(2, 4);
  wrong.setZero();
  CHECK_THROWS_AS(net.score(wrong), ValidationError);
}

TEST_CASE("attack net checkpoints round-trip bit-exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "tabmia_an_ckpt";
  std::filesystem::remove_all(dir);
  AttackNet net(6, AttackNetConfig{5, 2}, 21);
  // Give the running statistics non-default values first.
  Rng rng(3);
  Eigen::MatrixXd errors(8, 6);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 6; ++c) errors(r, c) = std::abs(rng.normal());
  }
  Eigen::VectorXd grads(net.n_params());
  net.train_step_loss(errors,
                      tabmia::testing::labels_of({1, 0, 1, 0, 1, 0, 1, 0}),
                      grads);
  save_attack_net(dir, net, nlohmann::json::object());
  const AttackNet loaded = load_attack_net(dir);
  CHECK(loaded.parameters() == net.parameters());
  CHECK(loaded.running_stats() == net.running_stats());
  CHECK(loaded.score(errors) == net.score(errors));
  std::filesystem::remove_all(dir);
}
