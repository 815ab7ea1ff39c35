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

#ifndef TABMIA_CHECKPOINT_HPP_
#define TABMIA_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace tabmia {

inline constexpr int kCheckpointFormatVersion = 1;

// A named view into flat little-endian float64 data to be written.
struct NamedBlob {
  std::string name;
  const double* data = nullptr;
  int64_t count = 0;
};

// Writes manifest.json + params.bin into `dir`. The manifest receives
// format_version and a blob table {name, offset (in values), count}; the
// caller supplies everything model-specific. Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& dir,
                     nlohmann::json manifest,
                     const std::vector<NamedBlob>& blobs);

struct Checkpoint {
  nlohmann::json manifest() const;
  std::string manifest_text;  // exact bytes, for fingerprinting
  std::map<std::string, Eigen::VectorXd> blobs;
};

Checkpoint load_checkpoint(const std::filesystem::path& dir);

// FNV-1a over manifest bytes then blob bytes; hex-encoded. Stable across
// reruns because neither file carries volatile content.
std::string checkpoint_fingerprint(const std::filesystem::path& dir);

// FNV-1a hex digest of an arbitrary file (used to pin prepare artifacts).
std::string file_fingerprint(const std::filesystem::path& path);

// Raw little-endian float64 matrix files (row-major), used for encoded data
// persisted inside run directories. Shape travels in a JSON sidecar.
void write_matrix_le(const std::filesystem::path& path,
                     const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_le(const std::filesystem::path& path, int64_t rows,
                               int64_t cols);

}  // namespace tabmia

#endif  // TABMIA_CHECKPOINT_HPP_
