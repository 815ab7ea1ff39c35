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

#ifndef TABMIA_SECMI_HPP_
#define TABMIA_SECMI_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tabmia/denoiser.hpp"
#include "tabmia/schedule.hpp"

namespace tabmia {

enum class Membership : uint8_t { kNonmember = 0, kMember = 1 };

// Clean-data estimate recovered from a noisy state:
//   f(x_t, t) = (x_t - sqrt(1 - alpha_bar_t) * eps(x_t, t)) / sqrt(alpha_bar_t)
// Valid for 0 <= t <= T; at t = 0 it returns x_t unchanged.
Eigen::MatrixXd predict_x0(const NoisePredictor& model,
                           const Eigen::MatrixXd& xt, int t,
                           const NoiseSchedule& schedule);

// Deterministic one-step diffusion: maps a state at timestep t to t + 1 by
// re-noising the clean-data estimate with the predicted noise. 0 <= t <= T-1.
Eigen::MatrixXd phi_step(const NoisePredictor& model, const Eigen::MatrixXd& xt,
                         int t, const NoiseSchedule& schedule);

// Deterministic one-step denoising: maps a state at timestep t to t - 1.
// 1 <= t <= T. At t = 1 this returns the clean-data estimate itself.
Eigen::MatrixXd psi_step(const NoisePredictor& model, const Eigen::MatrixXd& xt,
                         int t, const NoiseSchedule& schedule);

// Iterates phi_step from clean data at timestep 0 up to t_target. Purely
// deterministic; no sampled noise anywhere. 0 <= t_target <= T-1.
Eigen::MatrixXd deterministic_diffuse(const NoisePredictor& model,
                                      const Eigen::MatrixXd& x0, int t_target,
                                      const NoiseSchedule& schedule);

struct TErrorRow {
  Eigen::VectorXd residuals;  // squared residual per encoded dimension
  double total = 0.0;         // sum over dimensions
};

// Step-wise reconstruction error at timestep t: deterministically diffuse x0
// to t, push one step forward, pull one step back, and measure the squared
// residual against the state at t. 1 <= t <= T-1.
//
// The default round trip is psi(phi(x_t, t), t+1), which compares states at
// the same timestep and vanishes identically for any predictor that ignores
// its input. `literal_indexing` instead evaluates psi(phi(x_t, t), t) — the
// same expression with psi told the state is still at t — kept selectable
// for comparison runs.
TErrorRow t_error(const NoisePredictor& model, const Eigen::VectorXd& x0, int t,
                  const NoiseSchedule& schedule,
                  bool literal_indexing = false);

// Per-row, per-dimension t-errors with membership labels and the mapping of
// encoded dimensions back to source columns.
struct TErrorMatrix {
  int t = 0;
  Eigen::MatrixXd errors;  // n_rows x d, all entries >= 0
  std::vector<Membership> labels;
  std::vector<int> column_map;             // d -> source column id
  std::vector<std::string> column_names;   // one per distinct source column
  std::vector<int> column_ids;             // distinct source ids, in order

  Eigen::VectorXd row_sums() const { return errors.rowwise().sum(); }
  // Sums one-hot blocks into their source columns: n_rows x n_source_columns.
  Eigen::MatrixXd source_column_sums() const;
  int64_t n_rows() const { return errors.rows(); }
};

TErrorMatrix t_error_matrix(const NoisePredictor& model,
                            const Eigen::MatrixXd& rows,
                            const std::vector<Membership>& labels, int t,
                            const NoiseSchedule& schedule,
                            std::vector<int> column_map = {},
                            std::vector<std::string> column_names = {},
                            bool literal_indexing = false);

// Evaluates t-errors at several timesteps while diffusing each row only
// once: the deterministic trajectory is shared across requested timesteps,
// which is exactly equivalent to (and bit-identical with) calling
// t_error_matrix per timestep. Timestep queries must be nondecreasing.
class TErrorSweep {
 public:
  TErrorSweep(const NoisePredictor& model, Eigen::MatrixXd rows,
              std::vector<Membership> labels, const NoiseSchedule& schedule,
              std::vector<int> column_map = {},
              std::vector<std::string> column_names = {},
              bool literal_indexing = false);

  TErrorMatrix at(int t);

 private:
  const NoisePredictor& model_;
  const NoiseSchedule& schedule_;
  Eigen::MatrixXd state_;  // trajectory at timestep `reached_`
  int reached_ = 0;
  std::vector<Membership> labels_;
  std::vector<int> column_map_;
  std::vector<std::string> column_names_;
  std::vector<int> column_ids_;
  bool literal_indexing_;
};

// Threshold attack over row-summed t-errors. The threshold is calibrated on
// a seeded row subset by maximizing balanced accuracy over midpoints of
// consecutive distinct scores; rows scoring strictly below it are predicted
// members. Scores for every row are retained so ROC construction stays
// threshold-free.
struct StatAttackResult {
  double threshold = 0.0;
  double calibration_balanced_accuracy = 0.0;
  Eigen::VectorXd scores;  // all rows
  std::vector<int64_t> calibration_rows;
  std::vector<int64_t> heldout_rows;
  std::vector<Membership> heldout_predictions;  // aligned with heldout_rows
  double calibration_fraction = 0.0;
  uint64_t seed = 0;
};

StatAttackResult stat_attack(const TErrorMatrix& errors,
                             double calibration_fraction, uint64_t seed);

// Balanced accuracy of "member iff score < threshold" over the given rows.
double balanced_accuracy_below(const Eigen::VectorXd& scores,
                               const std::vector<Membership>& labels,
                               double threshold);

struct ThresholdChoice {
  double threshold = 0.0;
  double balanced_accuracy = 0.0;
};

// The calibration rule behind stat_attack: the midpoint between consecutive
// distinct sorted scores that maximizes balanced accuracy; accuracy ties
// resolve to the lowest midpoint, and an all-equal score set keeps that
// single value. Requires both classes.
ThresholdChoice select_threshold(const Eigen::VectorXd& scores,
                                 const std::vector<Membership>& labels);

}  // namespace tabmia

#endif  // TABMIA_SECMI_HPP_
