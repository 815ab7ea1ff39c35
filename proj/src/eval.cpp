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

#include "tabmia/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "tabmia/errors.hpp"
#include "tabmia/format.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

RocReport roc(const Eigen::VectorXd& scores,
              const std::vector<Membership>& labels, bool higher_is_member,
              const std::vector<double>& fpr_targets) {
  const Eigen::Index n = scores.size();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw ValidationError("one label per score required");
  }
  int64_t positives = 0, negatives = 0;
  for (const auto label : labels) {
    (label == Membership::kMember ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0) {
    throw ValidationError("ROC needs scores from both classes");
  }

  // Orient so larger always means more member-like, then sweep descending.
  std::vector<std::pair<double, Membership>> oriented(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    oriented[static_cast<size_t>(i)] = {
        higher_is_member ? scores[i] : -scores[i],
        labels[static_cast<size_t>(i)]};
  }
  std::sort(oriented.begin(), oriented.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocReport report;
  report.higher_is_member = higher_is_member;
  const double inf = std::numeric_limits<double>::infinity();
  report.points.push_back(RocPoint{higher_is_member ? inf : -inf, 0.0, 0.0});

  int64_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < oriented.size()) {
    const double value = oriented[i].first;
    // All rows with exactly this score form one threshold step.
    while (i < oriented.size() && oriented[i].first == value) {
      (oriented[i].second == Membership::kMember ? tp : fp) += 1;
      ++i;
    }
    report.points.push_back(
        RocPoint{higher_is_member ? value : -value,
                 static_cast<double>(fp) / static_cast<double>(negatives),
                 static_cast<double>(tp) / static_cast<double>(positives)});
  }

  double auc = 0.0;
  for (size_t k = 1; k < report.points.size(); ++k) {
    const auto& a = report.points[k - 1];
    const auto& b = report.points[k];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  report.auc = auc;
  for (double target : fpr_targets) {
    report.tpr_at[target] = tpr_at_fpr(report, target);
  }
  return report;
}

double tpr_at_fpr(const RocReport& report, double fpr_target) {
  if (fpr_target < 0.0 || fpr_target > 1.0) {
    throw ValidationError("FPR target must lie in [0, 1]");
  }
  double best = 0.0;
  for (const auto& point : report.points) {
    if (point.fpr <= fpr_target) best = std::max(best, point.tpr);
  }
  return best;
}

namespace {

RatioEntry ratio_of(double nonmember_mean, double member_mean) {
  if (member_mean == 0.0) return RatioEntry{0.0, false};
  return RatioEntry{nonmember_mean / member_mean, true};
}

}  // namespace

RatioReport ratio_report(const std::vector<TErrorMatrix>& errors_by_t) {
  RatioReport report;
  for (const auto& matrix : errors_by_t) {
    int64_t members = 0, nonmembers = 0;
    for (const auto label : matrix.labels) {
      (label == Membership::kMember ? members : nonmembers) += 1;
    }
    if (members == 0 || nonmembers == 0) {
      throw ValidationError("ratio report needs both classes at timestep " +
                            std::to_string(matrix.t));
    }
    if (report.column_names.empty()) {
      report.column_names = matrix.column_names;
    } else if (report.column_names != matrix.column_names) {
      throw ValidationError("inconsistent column layout across timesteps");
    }

    const Eigen::VectorXd totals = matrix.row_sums();
    const Eigen::MatrixXd by_column = matrix.source_column_sums();
    double member_total = 0.0, nonmember_total = 0.0;
    Eigen::VectorXd member_cols = Eigen::VectorXd::Zero(by_column.cols());
    Eigen::VectorXd nonmember_cols = Eigen::VectorXd::Zero(by_column.cols());
    for (int64_t r = 0; r < matrix.n_rows(); ++r) {
      if (matrix.labels[static_cast<size_t>(r)] == Membership::kMember) {
        member_total += totals[r];
        member_cols += by_column.row(r).transpose();
      } else {
        nonmember_total += totals[r];
        nonmember_cols += by_column.row(r).transpose();
      }
    }
    member_total /= static_cast<double>(members);
    nonmember_total /= static_cast<double>(nonmembers);
    member_cols /= static_cast<double>(members);
    nonmember_cols /= static_cast<double>(nonmembers);

    report.timesteps.push_back(matrix.t);
    report.total.push_back(ratio_of(nonmember_total, member_total));
    std::vector<RatioEntry> columns;
    for (Eigen::Index c = 0; c < by_column.cols(); ++c) {
      columns.push_back(ratio_of(nonmember_cols[c], member_cols[c]));
    }
    report.columns.push_back(std::move(columns));
  }
  return report;
}

namespace {

Eigen::MatrixXd subsample_rows(const Eigen::MatrixXd& rows, int64_t target,
                               uint64_t seed) {
  std::vector<int64_t> order(rows.rows());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  order.resize(static_cast<size_t>(target));
  std::sort(order.begin(), order.end());
  Eigen::MatrixXd out(target, rows.cols());
  for (int64_t i = 0; i < target; ++i) out.row(i) = rows.row(order[i]);
  return out;
}

double nearest_distance(const Eigen::MatrixXd& reference,
                        const Eigen::RowVectorXd& row) {
  const double min_sq =
      (reference.rowwise() - row).rowwise().squaredNorm().minCoeff();
  return std::sqrt(min_sq);
}

}  // namespace

DcrReport dcr(const Eigen::MatrixXd& synthetic, const Eigen::MatrixXd& member,
              const Eigen::MatrixXd& nonmember_holdout,
              uint64_t subsample_seed) {
  if (synthetic.rows() == 0 || member.rows() == 0 ||
      nonmember_holdout.rows() == 0) {
    throw ValidationError("distance comparison needs non-empty row sets");
  }
  if (synthetic.cols() != member.cols() ||
      member.cols() != nonmember_holdout.cols()) {
    throw ValidationError("row sets live in different encoded spaces");
  }

  const int64_t reference = std::min(member.rows(), nonmember_holdout.rows());
  const Eigen::MatrixXd member_ref =
      member.rows() == reference
          ? member
          : subsample_rows(member, reference,
                           derive_seed(subsample_seed, "member"));
  const Eigen::MatrixXd nonmember_ref =
      nonmember_holdout.rows() == reference
          ? nonmember_holdout
          : subsample_rows(nonmember_holdout, reference,
                           derive_seed(subsample_seed, "nonmember"));

  DcrReport report;
  report.n_synthetic = synthetic.rows();
  report.reference_size = reference;
  report.subsample_seed = subsample_seed;
  report.distances_member.resize(synthetic.rows());
  report.distances_nonmember.resize(synthetic.rows());
  for (int64_t i = 0; i < synthetic.rows(); ++i) {
    const double d_member = nearest_distance(member_ref, synthetic.row(i));
    const double d_nonmember =
        nearest_distance(nonmember_ref, synthetic.row(i));
    report.distances_member[i] = d_member;
    report.distances_nonmember[i] = d_nonmember;
    if (d_member < d_nonmember) {
      ++report.wins_member;
    } else if (d_member == d_nonmember) {
      ++report.ties;
    }
  }
  report.dcr_score = (static_cast<double>(report.wins_member) +
                      0.5 * static_cast<double>(report.ties)) /
                     static_cast<double>(report.n_synthetic);
  return report;
}

void write_roc_csv(const RocReport& report,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "threshold,fpr,tpr\n";
  for (const auto& point : report.points) {
    out << format_double(point.threshold) << "," << format_double(point.fpr)
        << "," << format_double(point.tpr) << "\n";
  }
}

void write_ratio_csv(const RatioReport& report,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "t,total_ratio";
  for (size_t c = 0; c < report.column_names.size(); ++c) {
    out << ",col_" << c;
  }
  out << "\n";
  for (size_t i = 0; i < report.timesteps.size(); ++i) {
    out << report.timesteps[i];
    const auto emit = [&out](const RatioEntry& entry) {
      out << "," << (entry.defined ? format_double(entry.value) : "nan");
    };
    emit(report.total[i]);
    for (const auto& entry : report.columns[i]) emit(entry);
    out << "\n";
  }
}

nlohmann::json dcr_to_json(const DcrReport& report) {
  std::vector<double> member(report.distances_member.data(),
                             report.distances_member.data() +
                                 report.distances_member.size());
  std::vector<double> nonmember(report.distances_nonmember.data(),
                                report.distances_nonmember.data() +
                                    report.distances_nonmember.size());
  return nlohmann::json{{"dcr_score", report.dcr_score},
                        {"wins_member", report.wins_member},
                        {"ties", report.ties},
                        {"n_synthetic", report.n_synthetic},
                        {"reference_size", report.reference_size},
                        {"subsample_seed", report.subsample_seed},
                        {"distances_member", std::move(member)},
                        {"distances_nonmember", std::move(nonmember)}};
}

nlohmann::json roc_summary_json(const RocReport& report) {
  nlohmann::json tpr = nlohmann::json::object();
  for (const auto& [target, value] : report.tpr_at) {
    tpr[format_double(target)] = value;
  }
  return nlohmann::json{{"auc", report.auc},
                        {"tpr_at", std::move(tpr)},
                        {"higher_is_member", report.higher_is_member},
                        {"n_points", report.points.size()}};
}

void emit_reports(const ReportBundle& bundle,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (bundle.metrics != nullptr) {
    std::ofstream out(out_dir / "metrics.json");
    if (!out) {
      throw ValidationError("cannot write " +
                            (out_dir / "metrics.json").string());
    }
    out << bundle.metrics->dump(2) << "\n";
  }
  if (bundle.roc_primary) {
    write_roc_csv(*bundle.roc_primary, out_dir / "roc.csv");
  }
  if (bundle.roc_stat) {
    write_roc_csv(*bundle.roc_stat, out_dir / "roc_stat.csv");
  }
  if (bundle.ratios) {
    write_ratio_csv(*bundle.ratios, out_dir / "ratio.csv");
  }
  if (bundle.dcr_report) {
    std::ofstream out(out_dir / "dcr.json");
    if (!out) {
      throw ValidationError("cannot write " + (out_dir / "dcr.json").string());
    }
    out << dcr_to_json(*bundle.dcr_report).dump(2) << "\n";
  }
}

}  // namespace tabmia
