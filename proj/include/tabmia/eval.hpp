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

#ifndef TABMIA_EVAL_HPP_
#define TABMIA_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "tabmia/secmi.hpp"

namespace tabmia {

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

// Full threshold sweep of a binary score. Points run from (0, 0) to (1, 1)
// with equal scores grouped into a single threshold step; the AUC is the
// trapezoidal integral of the stored points, which equals the pairwise
// ordering probability with ties counted half.
struct RocReport {
  std::vector<RocPoint> points;
  double auc = 0.0;
  bool higher_is_member = true;
  std::map<double, double> tpr_at;  // fpr target -> conservative tpr
};

RocReport roc(const Eigen::VectorXd& scores,
              const std::vector<Membership>& labels, bool higher_is_member,
              const std::vector<double>& fpr_targets = {0.01, 0.001});

// Largest TPR among swept thresholds with FPR <= fpr_target. Step function,
// no interpolation, so low-FPR numbers are never flattered.
double tpr_at_fpr(const RocReport& report, double fpr_target);

struct RatioEntry {
  double value = 0.0;
  bool defined = false;
};

// Mean non-member t-error over mean member t-error, per timestep, in total
// and per source column. Entries whose member mean is zero are flagged
// undefined rather than reported as a number.
struct RatioReport {
  std::vector<int> timesteps;
  std::vector<RatioEntry> total;                 // per timestep
  std::vector<std::vector<RatioEntry>> columns;  // [timestep][column]
  std::vector<std::string> column_names;
};

RatioReport ratio_report(const std::vector<TErrorMatrix>& errors_by_t);

// Distance-to-closest-record comparison. Each synthetic row's nearest
// Euclidean distance to the member set is compared against its nearest
// distance to an equal-size non-member reference; the score is the fraction
// of synthetic rows strictly closer to members, ties counted half. When the
// two reference sets differ in size, the larger is subsampled (seeded) to
// the smaller's size to keep the comparison unbiased.
struct DcrReport {
  double dcr_score = 0.0;
  int64_t wins_member = 0;
  int64_t ties = 0;
  int64_t n_synthetic = 0;
  int64_t reference_size = 0;
  uint64_t subsample_seed = 0;
  Eigen::VectorXd distances_member;
  Eigen::VectorXd distances_nonmember;
};

DcrReport dcr(const Eigen::MatrixXd& synthetic, const Eigen::MatrixXd& member,
              const Eigen::MatrixXd& nonmember_holdout, uint64_t subsample_seed);

// Everything cmd_report writes. Optional parts are skipped when absent.
struct ReportBundle {
  nlohmann::json* metrics = nullptr;  // owned by caller; serialized verbatim
  std::optional<RocReport> roc_primary;   // written to roc.csv
  std::optional<RocReport> roc_stat;      // written to roc_stat.csv
  std::optional<RatioReport> ratios;      // written to ratio.csv
  std::optional<DcrReport> dcr_report;    // written to dcr.json
};

// Writes metrics.json, roc.csv (threshold,fpr,tpr), ratio.csv
// (t,total_ratio,col_0,...), dcr.json into out_dir (created if missing).
// Byte-stable for identical inputs.
void emit_reports(const ReportBundle& bundle,
                  const std::filesystem::path& out_dir);

void write_roc_csv(const RocReport& report, const std::filesystem::path& path);
void write_ratio_csv(const RatioReport& report,
                     const std::filesystem::path& path);
nlohmann::json dcr_to_json(const DcrReport& report);
nlohmann::json roc_summary_json(const RocReport& report);

}  // namespace tabmia

#endif  // TABMIA_EVAL_HPP_
