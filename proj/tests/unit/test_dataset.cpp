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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "tabmia/dataset.hpp"
#include "tabmia/errors.hpp"
#include "tabmia/rng.hpp"

using namespace tabmia;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

TableSchema age_job_schema() {
  return TableSchema({{"age", ColumnKind::kNumerical, {}},
                      {"job", ColumnKind::kCategorical, {"a", "b"}}});
}

Dataset numeric_dataset(const std::vector<double>& values) {
  return Dataset(TableSchema({{"x", ColumnKind::kNumerical, {}}}),
                 static_cast<int64_t>(values.size()), {values}, {});
}

}  // namespace

TEST_CASE("load_table parses a small mixed file") {
  const auto path = temp_file("tabmia_ok.csv", "age,job\n30,a\n41,b\n29,a\n");
  const Dataset data = load_table(path, age_job_schema());
  REQUIRE(data.n_rows() == 3);
  CHECK(data.numeric_column(0) == std::vector<double>{30, 41, 29});
  CHECK(data.categorical_column(0) ==
        std::vector<std::string>{"a", "b", "a"});
}

TEST_CASE("load_table names the offending cell on a parse failure") {
  const auto path = temp_file("tabmia_bad.csv", "age,job\n30,a\nabc,b\n");
  try {
    load_table(path, age_job_schema());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string message = e.what();
    CHECK(message.find("row 1") != std::string::npos);
    CHECK(message.find("age") != std::string::npos);
  }
}

TEST_CASE("load_table rejects categories outside the schema list") {
  const auto path = temp_file("tabmia_cat.csv", "age,job\n30,a\n41,c\n");
  CHECK_THROWS_WITH_AS(load_table(path, age_job_schema()),
                       doctest::Contains("unknown category 'c'"),
                       ValidationError);
}

TEST_CASE("load_table rejects a header that disagrees with the schema") {
  const auto path = temp_file("tabmia_hdr.csv", "age,title\n30,a\n");
  CHECK_THROWS_AS(load_table(path, age_job_schema()), ValidationError);
  CHECK_THROWS_AS(load_table("/nonexistent/file.csv", age_job_schema()),
                  ValidationError);
}

TEST_CASE("schema invariants are enforced") {
  CHECK_THROWS_AS(TableSchema({{"x", ColumnKind::kNumerical, {}},
                               {"x", ColumnKind::kNumerical, {}}}),
                  ValidationError);
  CHECK_THROWS_AS(TableSchema({{"", ColumnKind::kNumerical, {}}}),
                  ValidationError);
  CHECK_THROWS_AS(TableSchema({{"c", ColumnKind::kCategorical, {"only"}}}),
                  ValidationError);
  // A categorical column may leave its category list open.
  CHECK_NOTHROW(TableSchema({{"c", ColumnKind::kCategorical, {}}}));
}

TEST_CASE("fit_encode z-scores with the population convention") {
  const auto encoded = fit_encode(numeric_dataset({1, 2, 3}), false);
  REQUIRE(encoded.values.rows() == 3);
  REQUIRE(encoded.values.cols() == 1);
  // mean 2, population stddev sqrt(2/3)
  CHECK(encoded.values(0, 0) ==
        doctest::Approx(-1.224744871391589).epsilon(1e-12));
  CHECK(encoded.values(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(encoded.values(2, 0) ==
        doctest::Approx(1.224744871391589).epsilon(1e-12));
}

TEST_CASE("fit_encode rejects constant numerical columns") {
  CHECK_THROWS_WITH_AS(fit_encode(numeric_dataset({5, 5, 5}), false),
                       doctest::Contains("'x'"), ValidationError);
}

TEST_CASE("categorical columns expand to one-hot blocks when included") {
  const Dataset data(age_job_schema(), 3, {{30, 41, 29}}, {{"a", "b", "a"}});
  const auto encoded = fit_encode(data, true);
  REQUIRE(encoded.values.cols() == 3);  // 1 numeric + 2 categories
  CHECK(encoded.values(0, 1) == 1.0);
  CHECK(encoded.values(0, 2) == 0.0);
  CHECK(encoded.values(1, 1) == 0.0);
  CHECK(encoded.values(1, 2) == 1.0);
  CHECK(encoded.values(2, 1) == 1.0);
  CHECK(encoded.column_map == std::vector<int>{0, 1, 1});

  const auto dropped = fit_encode(data, false);
  CHECK(dropped.values.cols() == 1);
  CHECK(dropped.column_map == std::vector<int>{0});
}

TEST_CASE("normalized dimensions have mean 0 and stddev 1 on the fit split") {
  Rng rng(11);
  std::vector<double> values(200);
  for (auto& v : values) v = rng.uniform(-50.0, 130.0);
  const auto encoded = fit_encode(numeric_dataset(values), false);
  const double mean = encoded.values.col(0).mean();
  const double var = encoded.values.col(0).array().square().mean();
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
}

TEST_CASE("apply_encode reuses fitted statistics without refitting") {
  const auto fit = fit_encode(numeric_dataset({1, 2, 3}), false);
  const auto applied = apply_encode(fit.transform, numeric_dataset({2}));
  CHECK(applied.values(0, 0) == 0.0);
  // Applying to the fitting data reproduces the fit output exactly.
  const auto again = apply_encode(fit.transform, numeric_dataset({1, 2, 3}));
  CHECK(again.values == fit.values);
}

TEST_CASE("apply_encode rejects a mismatched schema") {
  const auto fit = fit_encode(numeric_dataset({1, 2, 3}), false);
  const Dataset other(TableSchema({{"y", ColumnKind::kNumerical, {}}}), 1,
                      {{2.0}}, {});
  CHECK_THROWS_AS(apply_encode(fit.transform, other), ValidationError);
}

TEST_CASE("categories unseen at fit time encode as all-zeros blocks") {
  // Open category list: the fit sees only {a}, so the schema accepts 'b'
  // at load but the transform has no slot for it.
  const TableSchema schema({{"x", ColumnKind::kNumerical, {}},
                            {"c", ColumnKind::kCategorical, {}}});
  const Dataset fit_rows(schema, 2, {{1.0, 2.0}}, {{"a", "a"}});
  const auto fit = fit_encode(fit_rows, true);
  REQUIRE(fit.values.cols() == 2);
  const Dataset apply_rows(schema, 1, {{1.5}}, {{"b"}});
  const auto applied = apply_encode(fit.transform, apply_rows);
  CHECK(applied.values(0, 1) == 0.0);
  CHECK(applied.unseen_category_cells == 1);
}

TEST_CASE("decode inverts the encoding") {
  const Dataset data(age_job_schema(), 3, {{30, 41, 29}}, {{"a", "b", "a"}});
  const auto encoded = fit_encode(data, true);
  const Dataset decoded = decode_rows(encoded.transform, encoded.values);
  for (int r = 0; r < 3; ++r) {
    CHECK(decoded.numeric_column(0)[r] ==
          doctest::Approx(data.numeric_column(0)[r]).epsilon(1e-9));
    CHECK(decoded.categorical_column(0)[r] == data.categorical_column(0)[r]);
  }
}

TEST_CASE("encode/decode round trip holds for random mixed tables") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t n = rng.uniform_int(2, 60);
    std::vector<double> a(n), b(n);
    std::vector<std::string> c(n);
    for (int64_t i = 0; i < n; ++i) {
      a[i] = rng.uniform(-3.0, 9.0);
      b[i] = rng.normal() * 40.0 + 7.0;
      c[i] = rng.uniform() < 0.5 ? "left" : "right";
    }
    // Guarantee nonzero variance and both categories.
    a[0] = -10.0;
    a[n - 1] = 10.0;
    b[0] = -100.0;
    b[n - 1] = 100.0;
    c[0] = "left";
    c[n - 1] = "right";
    const TableSchema schema({{"a", ColumnKind::kNumerical, {}},
                              {"b", ColumnKind::kNumerical, {}},
                              {"c", ColumnKind::kCategorical,
                               {"left", "right"}}});
    const Dataset data(schema, n, {a, b}, {c});
    const auto encoded = fit_encode(data, true);
    const Dataset decoded = decode_rows(encoded.transform, encoded.values);
    for (int64_t i = 0; i < n; ++i) {
      CHECK(decoded.numeric_column(0)[i] ==
            doctest::Approx(a[i]).epsilon(1e-9));
      CHECK(decoded.numeric_column(1)[i] ==
            doctest::Approx(b[i]).epsilon(1e-9));
      CHECK(decoded.categorical_column(0)[i] == c[i]);
    }
  }
}

TEST_CASE("split sizes follow the floor rule") {
  std::vector<double> values(12330);
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(i);
  }
  const auto split = split_members(numeric_dataset(values), 0.9, 99);
  CHECK(split.member_indices.size() == 11097);
  CHECK(split.nonmember_indices.size() == 1233);
}

TEST_CASE("split is deterministic and partitions the rows") {
  std::vector<double> values(10);
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(i);
  }
  const Dataset data = numeric_dataset(values);
  const auto first = split_members(data, 0.9, 4242);
  const auto second = split_members(data, 0.9, 4242);
  CHECK(first.member_indices == second.member_indices);
  CHECK(first.nonmember_indices == second.nonmember_indices);

  const auto half = split_members(data, 0.5, 1);
  CHECK(half.member_indices.size() == 5);
  CHECK(half.nonmember_indices.size() == 5);
}

TEST_CASE("split partition property holds over random inputs") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t n = rng.uniform_int(10, 500);
    std::vector<double> values(static_cast<size_t>(n));
    for (auto& v : values) v = rng.normal();
    const double fraction = rng.uniform(0.05, 0.95);
    const auto split =
        split_members(numeric_dataset(values), fraction, rng.next_u64());
    std::set<int64_t> seen(split.member_indices.begin(),
                           split.member_indices.end());
    for (int64_t idx : split.nonmember_indices) {
      CHECK(seen.insert(idx).second);  // disjoint
    }
    CHECK(static_cast<int64_t>(seen.size()) == n);  // covers all rows
    const auto expected_members =
        static_cast<int64_t>(std::floor(fraction * static_cast<double>(n)));
    CHECK(static_cast<int64_t>(split.member_indices.size()) ==
          expected_members);
  }
}

TEST_CASE("split rejects bad fractions and tiny tables") {
  std::vector<double> values(10, 0.0);
  for (size_t i = 0; i < values.size(); ++i) values[i] = double(i);
  const Dataset data = numeric_dataset(values);
  CHECK_THROWS_AS(split_members(data, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(split_members(data, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(split_members(numeric_dataset({1, 2, 3}), 0.5, 1),
                  ValidationError);
}

TEST_CASE("subsample draws without replacement") {
  std::vector<double> values(30000);
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(i);
  }
  const Dataset data = numeric_dataset(values);
  const Dataset small = subsample(data, 12330, 8);
  CHECK(small.n_rows() == 12330);
  std::set<double> unique(small.numeric_column(0).begin(),
                          small.numeric_column(0).end());
  CHECK(unique.size() == 12330);

  const Dataset full = subsample(data, data.n_rows(), 8);
  std::set<double> all(full.numeric_column(0).begin(),
                       full.numeric_column(0).end());
  CHECK(all.size() == static_cast<size_t>(data.n_rows()));

  CHECK_THROWS_AS(subsample(data, 0, 8), ValidationError);
  CHECK_THROWS_AS(subsample(data, data.n_rows() + 1, 8), ValidationError);
}

TEST_CASE("split assignments survive a json round trip") {
  std::vector<double> values(25);
  for (size_t i = 0; i < values.size(); ++i) values[i] = double(i);
  const auto split = split_members(numeric_dataset(values), 0.8, 17);
  const auto rebuilt = SplitAssignment::from_json(split.to_json());
  CHECK(rebuilt.member_indices == split.member_indices);
  CHECK(rebuilt.nonmember_indices == split.nonmember_indices);
  CHECK(rebuilt.seed == split.seed);
}

TEST_CASE("transform survives a json round trip") {
  const Dataset data(age_job_schema(), 3, {{30, 41, 29}}, {{"a", "b", "a"}});
  const auto encoded = fit_encode(data, true);
  const auto rebuilt =
      EncodeTransform::from_json(encoded.transform.to_json());
  const auto applied = apply_encode(rebuilt, data);
  CHECK(applied.values == encoded.values);
}
