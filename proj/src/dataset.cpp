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

#include "tabmia/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "tabmia/errors.hpp"
#include "tabmia/format.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

namespace {

std::string kind_name(ColumnKind kind) {
  return kind == ColumnKind::kNumerical ? "numerical" : "categorical";
}

ColumnKind kind_from_name(const std::string& name) {
  if (name == "numerical") return ColumnKind::kNumerical;
  if (name == "categorical") return ColumnKind::kCategorical;
  throw ValidationError("unknown column kind '" + name + "'");
}

// Splits one CSV record. Fields may be wrapped in double quotes; "" inside a
// quoted field is an escaped quote.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

TableSchema::TableSchema(std::vector<ColumnSpec> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) {
    throw ValidationError("schema must declare at least one column");
  }
  std::set<std::string> seen;
  for (const auto& col : columns_) {
    if (col.name.empty()) {
      throw ValidationError("schema contains a column with an empty name");
    }
    if (!seen.insert(col.name).second) {
      throw ValidationError("duplicate column name '" + col.name + "'");
    }
    if (col.kind == ColumnKind::kNumerical) {
      if (!col.categories.empty()) {
        throw ValidationError("numerical column '" + col.name +
                              "' must not declare categories");
      }
      ++numerical_count_;
    } else if (!col.categories.empty() && col.categories.size() < 2) {
      throw ValidationError("categorical column '" + col.name +
                            "' must list at least 2 categories");
    }
  }
}

TableSchema TableSchema::from_json(const nlohmann::json& doc) {
  std::vector<ColumnSpec> columns;
  for (const auto& entry : doc.at("columns")) {
    ColumnSpec col;
    col.name = entry.at("name");
    col.kind = kind_from_name(entry.at("kind"));
    if (entry.contains("categories")) {
      col.categories = entry["categories"].get<std::vector<std::string>>();
    }
    columns.push_back(std::move(col));
  }
  return TableSchema(std::move(columns));
}

TableSchema TableSchema::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open schema file " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("schema file " + path.string() +
                          " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

nlohmann::json TableSchema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : columns_) {
    nlohmann::json entry;
    entry["name"] = col.name;
    entry["kind"] = kind_name(col.kind);
    if (col.kind == ColumnKind::kCategorical) {
      entry["categories"] = col.categories;
    }
    cols.push_back(std::move(entry));
  }
  return nlohmann::json{{"columns", std::move(cols)}};
}

std::string TableSchema::fingerprint() const {
  const std::string canonical = to_json().dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  return buf;
}

bool TableSchema::operator==(const TableSchema& other) const {
  return to_json() == other.to_json();
}

Dataset::Dataset(TableSchema schema, int64_t n_rows,
                 std::vector<std::vector<double>> numeric_columns,
                 std::vector<std::vector<std::string>> categorical_columns)
    : schema_(std::move(schema)),
      n_rows_(n_rows),
      numeric_columns_(std::move(numeric_columns)),
      categorical_columns_(std::move(categorical_columns)) {
  const size_t want_num = static_cast<size_t>(schema_.numerical_count());
  const size_t want_cat = schema_.size() - want_num;
  if (numeric_columns_.size() != want_num ||
      categorical_columns_.size() != want_cat) {
    throw ValidationError("dataset column storage does not match schema");
  }
  for (const auto& col : numeric_columns_) {
    if (static_cast<int64_t>(col.size()) != n_rows_) {
      throw ValidationError("numeric column length mismatch");
    }
  }
  for (const auto& col : categorical_columns_) {
    if (static_cast<int64_t>(col.size()) != n_rows_) {
      throw ValidationError("categorical column length mismatch");
    }
  }
}

Dataset Dataset::select_rows(const std::vector<int64_t>& rows) const {
  for (int64_t r : rows) {
    if (r < 0 || r >= n_rows_) {
      throw ValidationError("row index " + std::to_string(r) +
                            " out of range");
    }
  }
  std::vector<std::vector<double>> numeric(numeric_columns_.size());
  for (size_t c = 0; c < numeric_columns_.size(); ++c) {
    numeric[c].reserve(rows.size());
    for (int64_t r : rows) numeric[c].push_back(numeric_columns_[c][r]);
  }
  std::vector<std::vector<std::string>> categorical(
      categorical_columns_.size());
  for (size_t c = 0; c < categorical_columns_.size(); ++c) {
    categorical[c].reserve(rows.size());
    for (int64_t r : rows) {
      categorical[c].push_back(categorical_columns_[c][r]);
    }
  }
  return Dataset(schema_, static_cast<int64_t>(rows.size()),
                 std::move(numeric), std::move(categorical));
}

Dataset load_table(const std::filesystem::path& path,
                   const TableSchema& schema) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open data file " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("data file " + path.string() + " is empty");
  }
  const auto header = split_csv_line(strip_cr(line));
  const auto& columns = schema.columns();
  if (header.size() != columns.size()) {
    throw ValidationError("header of " + path.string() + " has " +
                          std::to_string(header.size()) +
                          " columns, schema declares " +
                          std::to_string(columns.size()));
  }
  for (size_t c = 0; c < columns.size(); ++c) {
    if (header[c] != columns[c].name) {
      throw ValidationError("header column " + std::to_string(c) + " is '" +
                            header[c] + "', schema expects '" +
                            columns[c].name + "'");
    }
  }

  // Precompute storage rank and category membership per column.
  std::vector<int> rank(columns.size(), 0);
  std::vector<std::set<std::string>> allowed(columns.size());
  int num_rank = 0, cat_rank = 0;
  for (size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].kind == ColumnKind::kNumerical) {
      rank[c] = num_rank++;
    } else {
      rank[c] = cat_rank++;
      allowed[c].insert(columns[c].categories.begin(),
                        columns[c].categories.end());
    }
  }

  std::vector<std::vector<double>> numeric(num_rank);
  std::vector<std::vector<std::string>> categorical(cat_rank);
  int64_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    auto fields = split_csv_line(line);
    if (fields.size() != columns.size()) {
      throw ValidationError("row " + std::to_string(row) + " of " +
                            path.string() + " has " +
                            std::to_string(fields.size()) + " fields, want " +
                            std::to_string(columns.size()));
    }
    for (size_t c = 0; c < columns.size(); ++c) {
      const auto& col = columns[c];
      if (col.kind == ColumnKind::kNumerical) {
        const auto value = parse_double(fields[c]);
        if (!value || !std::isfinite(*value)) {
          throw ValidationError("cell at row " + std::to_string(row) +
                                ", column '" + col.name +
                                "' is not a finite number: '" + fields[c] +
                                "'");
        }
        numeric[rank[c]].push_back(*value);
      } else {
        if (!col.categories.empty() && allowed[c].count(fields[c]) == 0) {
          throw ValidationError("cell at row " + std::to_string(row) +
                                ", column '" + col.name +
                                "' has unknown category '" + fields[c] + "'");
        }
        categorical[rank[c]].push_back(fields[c]);
      }
    }
    ++row;
  }
  return Dataset(schema, row, std::move(numeric), std::move(categorical));
}

void write_table_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write " + path.string());
  }
  const auto& columns = data.schema().columns();
  for (size_t c = 0; c < columns.size(); ++c) {
    out << (c ? "," : "") << columns[c].name;
  }
  out << "\n";
  int num_rank = 0, cat_rank = 0;
  std::vector<int> rank(columns.size());
  for (size_t c = 0; c < columns.size(); ++c) {
    rank[c] = columns[c].kind == ColumnKind::kNumerical ? num_rank++
                                                        : cat_rank++;
  }
  for (int64_t r = 0; r < data.n_rows(); ++r) {
    for (size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ",";
      if (columns[c].kind == ColumnKind::kNumerical) {
        out << format_double(data.numeric_column(rank[c])[r]);
      } else {
        out << data.categorical_column(rank[c])[r];
      }
    }
    out << "\n";
  }
}

EncodeTransform::EncodeTransform(
    TableSchema schema, bool include_categorical,
    std::vector<NumericStats> numeric_stats,
    std::vector<std::vector<std::string>> category_lists)
    : schema_(std::move(schema)),
      include_categorical_(include_categorical),
      numeric_stats_(std::move(numeric_stats)),
      category_lists_(std::move(category_lists)) {}

int EncodeTransform::encoded_dim() const {
  int dim = schema_.numerical_count();
  if (include_categorical_) {
    for (const auto& list : category_lists_) {
      dim += static_cast<int>(list.size());
    }
  }
  return dim;
}

std::vector<int> EncodeTransform::column_map() const {
  std::vector<int> map;
  const auto& columns = schema_.columns();
  int cat_rank = 0;
  for (size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].kind == ColumnKind::kNumerical) {
      map.push_back(static_cast<int>(c));
    } else {
      if (include_categorical_) {
        for (size_t k = 0; k < category_lists_[cat_rank].size(); ++k) {
          map.push_back(static_cast<int>(c));
        }
      }
      ++cat_rank;
    }
  }
  return map;
}

std::vector<std::string> EncodeTransform::encoded_column_names() const {
  std::vector<std::string> names;
  for (int id : encoded_column_ids()) {
    names.push_back(schema_.columns()[id].name);
  }
  return names;
}

std::vector<int> EncodeTransform::encoded_column_ids() const {
  std::vector<int> ids;
  for (int id : column_map()) {
    if (ids.empty() || ids.back() != id) ids.push_back(id);
  }
  return ids;
}

nlohmann::json EncodeTransform::to_json() const {
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& s : numeric_stats_) {
    stats.push_back({{"mean", s.mean}, {"stddev", s.stddev}});
  }
  return nlohmann::json{{"schema", schema_.to_json()},
                        {"include_categorical", include_categorical_},
                        {"numeric_stats", std::move(stats)},
                        {"category_lists", category_lists_}};
}

EncodeTransform EncodeTransform::from_json(const nlohmann::json& doc) {
  std::vector<NumericStats> stats;
  for (const auto& entry : doc.at("numeric_stats")) {
    stats.push_back(NumericStats{entry.at("mean"), entry.at("stddev")});
  }
  return EncodeTransform(
      TableSchema::from_json(doc.at("schema")), doc.at("include_categorical"),
      std::move(stats),
      doc.at("category_lists").get<std::vector<std::vector<std::string>>>());
}

namespace {

EncodedMatrix encode_with(const EncodeTransform& transform,
                          const Dataset& data) {
  const auto& columns = transform.schema().columns();
  const int64_t n = data.n_rows();
  EncodedMatrix out;
  out.transform = transform;
  out.column_map = transform.column_map();
  out.values.setZero(n, transform.encoded_dim());

  int num_rank = 0, cat_rank = 0, dim = 0;
  for (size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].kind == ColumnKind::kNumerical) {
      const auto& stats = transform.numeric_stats()[num_rank];
      const auto& cells = data.numeric_column(num_rank);
      for (int64_t r = 0; r < n; ++r) {
        out.values(r, dim) = (cells[r] - stats.mean) / stats.stddev;
      }
      ++num_rank;
      ++dim;
    } else {
      if (transform.include_categorical()) {
        const auto& list = transform.category_lists()[cat_rank];
        std::unordered_map<std::string, int> index;
        for (size_t k = 0; k < list.size(); ++k) {
          index.emplace(list[k], static_cast<int>(k));
        }
        const auto& cells = data.categorical_column(cat_rank);
        for (int64_t r = 0; r < n; ++r) {
          const auto it = index.find(cells[r]);
          if (it == index.end()) {
            // Leave the block all zeros so evaluation of held-out rows with
            // labels unseen at fit time never aborts.
            ++out.unseen_category_cells;
          } else {
            out.values(r, dim + it->second) = 1.0;
          }
        }
        dim += static_cast<int>(list.size());
      }
      ++cat_rank;
    }
  }
  if (out.unseen_category_cells > 0) {
    std::cerr << "warning: " << out.unseen_category_cells
              << " categorical cell(s) had labels unseen at fit time and "
                 "were encoded as all-zeros blocks\n";
  }
  return out;
}

}  // namespace

EncodedMatrix fit_encode(const Dataset& data, bool include_categorical) {
  if (data.n_rows() == 0) {
    throw ValidationError("cannot fit an encoder on an empty dataset");
  }
  const auto& columns = data.schema().columns();
  std::vector<NumericStats> stats;
  std::vector<std::vector<std::string>> category_lists;
  int num_rank = 0, cat_rank = 0;
  for (const auto& col : columns) {
    if (col.kind == ColumnKind::kNumerical) {
      const auto& cells = data.numeric_column(num_rank);
      const double n = static_cast<double>(cells.size());
      double mean = 0.0;
      for (double v : cells) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : cells) var += (v - mean) * (v - mean);
      var /= n;
      if (var <= 0.0) {
        throw ValidationError("numerical column '" + col.name +
                              "' has zero variance on the fitting split");
      }
      stats.push_back(NumericStats{mean, std::sqrt(var)});
      ++num_rank;
    } else {
      if (!col.categories.empty()) {
        category_lists.push_back(col.categories);
      } else {
        // Infer the category order from the fitting split, sorted for
        // determinism.
        std::set<std::string> seen(data.categorical_column(cat_rank).begin(),
                                   data.categorical_column(cat_rank).end());
        category_lists.emplace_back(seen.begin(), seen.end());
      }
      ++cat_rank;
    }
  }
  EncodeTransform transform(data.schema(), include_categorical,
                            std::move(stats), std::move(category_lists));
  return encode_with(transform, data);
}

EncodedMatrix apply_encode(const EncodeTransform& transform,
                           const Dataset& data) {
  if (!(data.schema() == transform.schema())) {
    throw ValidationError(
        "dataset schema does not match the fitted transform's schema");
  }
  return encode_with(transform, data);
}

Dataset decode_rows(const EncodeTransform& transform,
                    const Eigen::MatrixXd& values) {
  if (values.cols() != transform.encoded_dim()) {
    throw ValidationError("decode input has " + std::to_string(values.cols()) +
                          " dimensions, transform encodes " +
                          std::to_string(transform.encoded_dim()));
  }
  const auto& columns = transform.schema().columns();
  const int64_t n = values.rows();

  std::vector<ColumnSpec> out_columns;
  std::vector<std::vector<double>> numeric;
  std::vector<std::vector<std::string>> categorical;
  int num_rank = 0, cat_rank = 0, dim = 0;
  for (const auto& col : columns) {
    if (col.kind == ColumnKind::kNumerical) {
      const auto& stats = transform.numeric_stats()[num_rank];
      std::vector<double> cells(n);
      for (int64_t r = 0; r < n; ++r) {
        cells[r] = values(r, dim) * stats.stddev + stats.mean;
      }
      out_columns.push_back(col);
      numeric.push_back(std::move(cells));
      ++num_rank;
      ++dim;
    } else {
      if (transform.include_categorical()) {
        const auto& list = transform.category_lists()[cat_rank];
        const int width = static_cast<int>(list.size());
        std::vector<std::string> cells(n);
        for (int64_t r = 0; r < n; ++r) {
          int best = 0;
          for (int k = 1; k < width; ++k) {
            if (values(r, dim + k) > values(r, dim + best)) best = k;
          }
          cells[r] = list[best];
        }
        ColumnSpec spec = col;
        spec.categories = list;
        out_columns.push_back(std::move(spec));
        categorical.push_back(std::move(cells));
        dim += width;
      }
      ++cat_rank;
    }
  }
  return Dataset(TableSchema(std::move(out_columns)), n, std::move(numeric),
                 std::move(categorical));
}

nlohmann::json SplitAssignment::to_json() const {
  return nlohmann::json{{"seed", seed},
                        {"member_indices", member_indices},
                        {"nonmember_indices", nonmember_indices}};
}

SplitAssignment SplitAssignment::from_json(const nlohmann::json& doc) {
  SplitAssignment split;
  split.seed = doc.at("seed");
  split.member_indices = doc.at("member_indices").get<std::vector<int64_t>>();
  split.nonmember_indices =
      doc.at("nonmember_indices").get<std::vector<int64_t>>();
  return split;
}

SplitAssignment split_members(const Dataset& data, double member_fraction,
                              uint64_t seed) {
  if (!(member_fraction > 0.0 && member_fraction < 1.0)) {
    throw ValidationError("member fraction must lie strictly in (0, 1)");
  }
  const int64_t n = data.n_rows();
  if (n < 10) {
    throw ValidationError("splitting requires at least 10 rows, got " +
                          std::to_string(n));
  }
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_member =
      static_cast<int64_t>(std::floor(member_fraction * static_cast<double>(n)));
  SplitAssignment split;
  split.seed = seed;
  split.member_indices.assign(order.begin(), order.begin() + n_member);
  split.nonmember_indices.assign(order.begin() + n_member, order.end());
  std::sort(split.member_indices.begin(), split.member_indices.end());
  std::sort(split.nonmember_indices.begin(), split.nonmember_indices.end());
  return split;
}

std::vector<int64_t> subsample_indices(int64_t n_rows, int64_t n_target,
                                       uint64_t seed) {
  if (n_target < 1) {
    throw ValidationError("subsample size must be at least 1");
  }
  if (n_target > n_rows) {
    throw ValidationError("subsample size " + std::to_string(n_target) +
                          " exceeds dataset rows " + std::to_string(n_rows));
  }
  std::vector<int64_t> order(n_rows);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<int64_t> keep(order.begin(), order.begin() + n_target);
  std::sort(keep.begin(), keep.end());
  return keep;
}

Dataset subsample(const Dataset& data, int64_t n_target, uint64_t seed) {
  return data.select_rows(subsample_indices(data.n_rows(), n_target, seed));
}

}  // namespace tabmia
