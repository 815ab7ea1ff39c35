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

#ifndef TABMIA_DATASET_HPP_
#define TABMIA_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace tabmia {

enum class ColumnKind { kNumerical, kCategorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumerical;
  // For categorical columns. May be left empty, in which case the category
  // set is inferred from the fitting split when the encoder is fitted.
  std::vector<std::string> categories;
};

// Ordered, validated column layout of a table.
class TableSchema {
 public:
  explicit TableSchema(std::vector<ColumnSpec> columns);

  static TableSchema from_json(const nlohmann::json& doc);
  static TableSchema from_json_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  size_t size() const { return columns_.size(); }
  int numerical_count() const { return numerical_count_; }

  // Hex digest of the canonical JSON form; stamped into checkpoints so an
  // attack run can verify it targets the data layout it was trained on.
  std::string fingerprint() const;

  bool operator==(const TableSchema& other) const;

 private:
  std::vector<ColumnSpec> columns_;
  int numerical_count_ = 0;
};

// Typed column-major table storage. Numerical cells are parsed doubles;
// categorical cells are kept as their labels.
class Dataset {
 public:
  Dataset(TableSchema schema, int64_t n_rows,
          std::vector<std::vector<double>> numeric_columns,
          std::vector<std::vector<std::string>> categorical_columns);

  const TableSchema& schema() const { return schema_; }
  int64_t n_rows() const { return n_rows_; }

  // Storage position: numeric columns indexed by their rank among numerical
  // columns (schema order), categorical likewise.
  const std::vector<double>& numeric_column(int rank) const {
    return numeric_columns_[rank];
  }
  const std::vector<std::string>& categorical_column(int rank) const {
    return categorical_columns_[rank];
  }

  Dataset select_rows(const std::vector<int64_t>& rows) const;

 private:
  TableSchema schema_;
  int64_t n_rows_;
  std::vector<std::vector<double>> numeric_columns_;
  std::vector<std::vector<std::string>> categorical_columns_;
};

// Reads a CSV file (comma-separated, header row, UTF-8) whose header must
// match the schema column names in order. Every cell is validated; errors
// name the offending row and column.
Dataset load_table(const std::filesystem::path& path,
                   const TableSchema& schema);

void write_table_csv(const Dataset& data, const std::filesystem::path& path);

struct NumericStats {
  double mean = 0.0;
  double stddev = 0.0;  // population convention (divide by n)
};

// Fitted per-column encoding statistics. Numerical columns are z-scored;
// categorical columns expand to one-hot blocks over the fitted category list
// when included, and are dropped from the encoding otherwise.
class EncodeTransform {
 public:
  EncodeTransform() = default;
  EncodeTransform(TableSchema schema, bool include_categorical,
                  std::vector<NumericStats> numeric_stats,
                  std::vector<std::vector<std::string>> category_lists);

  const TableSchema& schema() const { return schema_; }
  bool include_categorical() const { return include_categorical_; }
  const std::vector<NumericStats>& numeric_stats() const {
    return numeric_stats_;
  }
  const std::vector<std::vector<std::string>>& category_lists() const {
    return category_lists_;
  }

  int encoded_dim() const;
  // Maps each encoded dimension back to its source schema column index.
  std::vector<int> column_map() const;
  // Names of the source columns that contribute encoded dimensions, in
  // schema order (one entry per distinct column_map value).
  std::vector<std::string> encoded_column_names() const;
  std::vector<int> encoded_column_ids() const;

  nlohmann::json to_json() const;
  static EncodeTransform from_json(const nlohmann::json& doc);

 private:
  TableSchema schema_{std::vector<ColumnSpec>{
      ColumnSpec{"placeholder", ColumnKind::kNumerical, {}}}};
  bool include_categorical_ = false;
  std::vector<NumericStats> numeric_stats_;
  // Per categorical column (by categorical rank): fitted category order.
  std::vector<std::vector<std::string>> category_lists_;
};

struct EncodedMatrix {
  Eigen::MatrixXd values;  // n_rows x encoded_dim
  EncodeTransform transform;
  std::vector<int> column_map;
  // Rows whose categorical label was not in the fitted list encode as an
  // all-zeros one-hot block; counted here and warned about on stderr.
  int64_t unseen_category_cells = 0;
};

// Fits z-score statistics (and category lists, for columns whose schema left
// them open) on `data`, then encodes it. Numerical columns must have nonzero
// variance on the fitting split.
EncodedMatrix fit_encode(const Dataset& data, bool include_categorical);

// Applies previously fitted statistics; never refits. The dataset's schema
// must equal the transform's source schema.
EncodedMatrix apply_encode(const EncodeTransform& transform,
                           const Dataset& data);

// Inverts the encoding: de-normalizes numerical dimensions and resolves each
// one-hot block to the category with the largest value (lowest index wins
// ties). Only columns present in the encoding appear in the result schema.
Dataset decode_rows(const EncodeTransform& transform,
                    const Eigen::MatrixXd& values);

struct SplitAssignment {
  std::vector<int64_t> member_indices;
  std::vector<int64_t> nonmember_indices;
  uint64_t seed = 0;

  nlohmann::json to_json() const;
  static SplitAssignment from_json(const nlohmann::json& doc);
};

// Seeded uniform permutation; the first floor(fraction * n) rows become
// members. Index lists are emitted sorted ascending.
SplitAssignment split_members(const Dataset& data, double member_fraction,
                              uint64_t seed);

// Seeded uniform subset without replacement, n_target >= 1. The index form
// reports which source rows were kept (ascending).
std::vector<int64_t> subsample_indices(int64_t n_rows, int64_t n_target,
                                       uint64_t seed);
Dataset subsample(const Dataset& data, int64_t n_target, uint64_t seed);

}  // namespace tabmia

#endif  // TABMIA_DATASET_HPP_
