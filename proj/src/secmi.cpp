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

#include "tabmia/secmi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabmia/errors.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

namespace {

void check_range(int t, int lo, int hi, const char* what) {
  if (t < lo || t > hi) {
    throw ValidationError(std::string(what) + ": timestep " +
                          std::to_string(t) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) +
                          "]");
  }
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw DivergenceError(std::string("non-finite values in ") + what);
  }
}

std::vector<int> identity_column_map(int d) {
  std::vector<int> map(d);
  std::iota(map.begin(), map.end(), 0);
  return map;
}

std::vector<int> distinct_ids(const std::vector<int>& column_map) {
  std::vector<int> ids;
  for (int id : column_map) {
    if (ids.empty() || ids.back() != id) ids.push_back(id);
  }
  return ids;
}

}  // namespace

Eigen::MatrixXd predict_x0(const NoisePredictor& model,
                           const Eigen::MatrixXd& xt, int t,
                           const NoiseSchedule& schedule) {
  check_range(t, 0, schedule.timesteps(), "clean-data estimate");
  const double bar = schedule.alpha_bar(t);
  const Eigen::MatrixXd eps = model.predict(xt, t);
  return (xt - std::sqrt(1.0 - bar) * eps) / std::sqrt(bar);
}

Eigen::MatrixXd phi_step(const NoisePredictor& model, const Eigen::MatrixXd& xt,
                         int t, const NoiseSchedule& schedule) {
  check_range(t, 0, schedule.timesteps() - 1, "forward step");
  const double bar_t = schedule.alpha_bar(t);
  const double bar_next = schedule.alpha_bar(t + 1);
  const Eigen::MatrixXd eps = model.predict(xt, t);
  const Eigen::MatrixXd x0 = (xt - std::sqrt(1.0 - bar_t) * eps) /
                             std::sqrt(bar_t);
  return std::sqrt(bar_next) * x0 + std::sqrt(1.0 - bar_next) * eps;
}

Eigen::MatrixXd psi_step(const NoisePredictor& model, const Eigen::MatrixXd& xt,
                         int t, const NoiseSchedule& schedule) {
  check_range(t, 1, schedule.timesteps(), "backward step");
  const double bar_t = schedule.alpha_bar(t);
  const double bar_prev = schedule.alpha_bar(t - 1);
  const Eigen::MatrixXd eps = model.predict(xt, t);
  const Eigen::MatrixXd x0 = (xt - std::sqrt(1.0 - bar_t) * eps) /
                             std::sqrt(bar_t);
  return std::sqrt(bar_prev) * x0 + std::sqrt(1.0 - bar_prev) * eps;
}

Eigen::MatrixXd deterministic_diffuse(const NoisePredictor& model,
                                      const Eigen::MatrixXd& x0, int t_target,
                                      const NoiseSchedule& schedule) {
  check_range(t_target, 0, schedule.timesteps() - 1, "deterministic diffuse");
  Eigen::MatrixXd state = x0;
  for (int t = 0; t < t_target; ++t) {
    state = phi_step(model, state, t, schedule);
    check_finite(state, "deterministic diffusion state");
  }
  return state;
}

namespace {

// Round trip at timestep t for a state already diffused to t.
Eigen::MatrixXd round_trip(const NoisePredictor& model,
                           const Eigen::MatrixXd& state_t, int t,
                           const NoiseSchedule& schedule,
                           bool literal_indexing) {
  const Eigen::MatrixXd forward = phi_step(model, state_t, t, schedule);
  // The forward result lives at t+1, so the backward operator is applied at
  // t+1 and its output compares against the state at t. The literal variant
  // applies the backward operator with the stale index t.
  return psi_step(model, forward, literal_indexing ? t : t + 1, schedule);
}

}  // namespace

TErrorRow t_error(const NoisePredictor& model, const Eigen::VectorXd& x0, int t,
                  const NoiseSchedule& schedule, bool literal_indexing) {
  check_range(t, 1, schedule.timesteps() - 1, "t-error");
  const Eigen::MatrixXd state =
      deterministic_diffuse(model, x0.transpose(), t, schedule);
  const Eigen::MatrixXd back =
      round_trip(model, state, t, schedule, literal_indexing);
  check_finite(back, "t-error round trip");
  TErrorRow row;
  row.residuals = (back - state).row(0).transpose().array().square();
  row.total = row.residuals.sum();
  return row;
}

Eigen::MatrixXd TErrorMatrix::source_column_sums() const {
  Eigen::MatrixXd sums =
      Eigen::MatrixXd::Zero(errors.rows(), static_cast<Eigen::Index>(
                                               column_ids.size()));
  for (int d = 0; d < errors.cols(); ++d) {
    const auto it = std::find(column_ids.begin(), column_ids.end(),
                              column_map[static_cast<size_t>(d)]);
    sums.col(it - column_ids.begin()) += errors.col(d);
  }
  return sums;
}

namespace {

TErrorMatrix make_matrix(const Eigen::MatrixXd& state_t,
                         const Eigen::MatrixXd& back, int t,
                         const std::vector<Membership>& labels,
                         const std::vector<int>& column_map,
                         const std::vector<std::string>& column_names,
                         const std::vector<int>& column_ids) {
  TErrorMatrix out;
  out.t = t;
  out.errors = (back - state_t).array().square();
  out.labels = labels;
  out.column_map = column_map;
  out.column_names = column_names;
  out.column_ids = column_ids;
  return out;
}

}  // namespace

TErrorMatrix t_error_matrix(const NoisePredictor& model,
                            const Eigen::MatrixXd& rows,
                            const std::vector<Membership>& labels, int t,
                            const NoiseSchedule& schedule,
                            std::vector<int> column_map,
                            std::vector<std::string> column_names,
                            bool literal_indexing) {
  if (static_cast<Eigen::Index>(labels.size()) != rows.rows()) {
    throw ValidationError("one membership label per row required");
  }
  check_range(t, 1, schedule.timesteps() - 1, "t-error");
  if (column_map.empty()) {
    column_map = identity_column_map(static_cast<int>(rows.cols()));
  }
  if (static_cast<Eigen::Index>(column_map.size()) != rows.cols()) {
    throw ValidationError("column map width does not match data width");
  }
  const auto ids = distinct_ids(column_map);
  if (column_names.empty()) {
    for (int id : ids) column_names.push_back("dim_" + std::to_string(id));
  }
  const Eigen::MatrixXd state = deterministic_diffuse(model, rows, t, schedule);
  const Eigen::MatrixXd back =
      round_trip(model, state, t, schedule, literal_indexing);
  check_finite(back, "t-error round trip");
  return make_matrix(state, back, t, labels, column_map, column_names, ids);
}

TErrorSweep::TErrorSweep(const NoisePredictor& model, Eigen::MatrixXd rows,
                         std::vector<Membership> labels,
                         const NoiseSchedule& schedule,
                         std::vector<int> column_map,
                         std::vector<std::string> column_names,
                         bool literal_indexing)
    : model_(model),
      schedule_(schedule),
      state_(std::move(rows)),
      labels_(std::move(labels)),
      column_map_(std::move(column_map)),
      column_names_(std::move(column_names)),
      literal_indexing_(literal_indexing) {
  if (static_cast<Eigen::Index>(labels_.size()) != state_.rows()) {
    throw ValidationError("one membership label per row required");
  }
  if (column_map_.empty()) {
    column_map_ = identity_column_map(static_cast<int>(state_.cols()));
  }
  column_ids_ = distinct_ids(column_map_);
  if (column_names_.empty()) {
    for (int id : column_ids_) {
      column_names_.push_back("dim_" + std::to_string(id));
    }
  }
}

TErrorMatrix TErrorSweep::at(int t) {
  check_range(t, 1, schedule_.timesteps() - 1, "t-error");
  if (t < reached_) {
    throw ValidationError("sweep timesteps must be nondecreasing");
  }
  while (reached_ < t) {
    state_ = phi_step(model_, state_, reached_, schedule_);
    check_finite(state_, "deterministic diffusion state");
    ++reached_;
  }
  const Eigen::MatrixXd back =
      round_trip(model_, state_, t, schedule_, literal_indexing_);
  check_finite(back, "t-error round trip");
  return make_matrix(state_, back, t, labels_, column_map_, column_names_,
                     column_ids_);
}

double balanced_accuracy_below(const Eigen::VectorXd& scores,
                               const std::vector<Membership>& labels,
                               double threshold) {
  int64_t member_total = 0, member_hit = 0;
  int64_t nonmember_total = 0, nonmember_hit = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const bool predicted_member = scores[i] < threshold;
    if (labels[static_cast<size_t>(i)] == Membership::kMember) {
      ++member_total;
      if (predicted_member) ++member_hit;
    } else {
      ++nonmember_total;
      if (!predicted_member) ++nonmember_hit;
    }
  }
  if (member_total == 0 || nonmember_total == 0) {
    throw ValidationError("balanced accuracy needs both classes");
  }
  return 0.5 * (static_cast<double>(member_hit) / member_total +
                static_cast<double>(nonmember_hit) / nonmember_total);
}

ThresholdChoice select_threshold(const Eigen::VectorXd& scores,
                                 const std::vector<Membership>& labels) {
  if (scores.size() == 0) {
    throw ValidationError("threshold selection needs scores");
  }
  std::vector<double> sorted(scores.data(), scores.data() + scores.size());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  ThresholdChoice best{sorted.front(), -1.0};
  if (sorted.size() == 1) {
    best.balanced_accuracy =
        balanced_accuracy_below(scores, labels, best.threshold);
  }
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double candidate = 0.5 * (sorted[i] + sorted[i + 1]);
    const double accuracy = balanced_accuracy_below(scores, labels, candidate);
    if (accuracy > best.balanced_accuracy) {
      best = ThresholdChoice{candidate, accuracy};
    }
  }
  return best;
}

StatAttackResult stat_attack(const TErrorMatrix& errors,
                             double calibration_fraction, uint64_t seed) {
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw ValidationError("calibration fraction must lie in (0, 1)");
  }
  const int64_t n = errors.n_rows();
  if (n < 2) throw ValidationError("attack needs at least 2 rows");

  StatAttackResult result;
  result.scores = errors.row_sums();
  result.calibration_fraction = calibration_fraction;
  result.seed = seed;

  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_cal = std::max<int64_t>(
      1, static_cast<int64_t>(std::floor(calibration_fraction *
                                         static_cast<double>(n))));
  result.calibration_rows.assign(order.begin(), order.begin() + n_cal);
  result.heldout_rows.assign(order.begin() + n_cal, order.end());
  std::sort(result.calibration_rows.begin(), result.calibration_rows.end());
  std::sort(result.heldout_rows.begin(), result.heldout_rows.end());

  Eigen::VectorXd cal_scores(n_cal);
  std::vector<Membership> cal_labels(static_cast<size_t>(n_cal));
  bool has_member = false, has_nonmember = false;
  for (int64_t i = 0; i < n_cal; ++i) {
    cal_scores[i] = result.scores[result.calibration_rows[i]];
    cal_labels[static_cast<size_t>(i)] =
        errors.labels[static_cast<size_t>(result.calibration_rows[i])];
    (cal_labels[static_cast<size_t>(i)] == Membership::kMember
         ? has_member
         : has_nonmember) = true;
  }
  if (!has_member || !has_nonmember) {
    throw ValidationError(
        "calibration split contains a single class; use a different seed or "
        "fraction");
  }

  const ThresholdChoice choice = select_threshold(cal_scores, cal_labels);
  result.threshold = choice.threshold;
  result.calibration_balanced_accuracy = choice.balanced_accuracy;

  result.heldout_predictions.reserve(result.heldout_rows.size());
  for (int64_t row : result.heldout_rows) {
    result.heldout_predictions.push_back(result.scores[row] < result.threshold
                                             ? Membership::kMember
                                             : Membership::kNonmember);
  }
  return result;
}

}  // namespace tabmia
