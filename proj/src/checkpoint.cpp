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

#include "tabmia/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tabmia/errors.hpp"
#include "tabmia/rng.hpp"

namespace tabmia {

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kBlobName = "params.bin";

void write_f64_le(std::ofstream& out, double value) {
  const auto bits = std::bit_cast<uint64_t>(value);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double read_f64_le(const unsigned char* bytes) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<uint64_t>(bytes[i]) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MissingArtifactError("missing file " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir,
                     nlohmann::json manifest,
                     const std::vector<NamedBlob>& blobs) {
  std::filesystem::create_directories(dir);
  manifest["format_version"] = kCheckpointFormatVersion;
  manifest["blob_file"] = kBlobName;
  nlohmann::json table = nlohmann::json::array();
  int64_t offset = 0;
  for (const auto& blob : blobs) {
    table.push_back({{"name", blob.name},
                     {"offset", offset},
                     {"count", blob.count}});
    offset += blob.count;
  }
  manifest["blobs"] = std::move(table);

  {
    std::ofstream out(dir / kManifestName);
    if (!out) {
      throw ValidationError("cannot write " + (dir / kManifestName).string());
    }
    out << manifest.dump(2) << "\n";
  }
  std::ofstream out(dir / kBlobName, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write " + (dir / kBlobName).string());
  }
  for (const auto& blob : blobs) {
    for (int64_t i = 0; i < blob.count; ++i) {
      write_f64_le(out, blob.data[i]);
    }
  }
}

nlohmann::json Checkpoint::manifest() const {
  return nlohmann::json::parse(manifest_text);
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  Checkpoint ckpt;
  ckpt.manifest_text = read_file_bytes(dir / kManifestName);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(ckpt.manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("corrupt checkpoint manifest in " + dir.string() +
                          ": " + e.what());
  }
  const std::string bytes = read_file_bytes(dir / kBlobName);
  for (const auto& entry : manifest.at("blobs")) {
    const int64_t offset = entry.at("offset");
    const int64_t count = entry.at("count");
    if ((offset + count) * 8 > static_cast<int64_t>(bytes.size())) {
      throw ValidationError("checkpoint blob file in " + dir.string() +
                            " is shorter than its manifest declares");
    }
    Eigen::VectorXd values(count);
    const auto* base =
        reinterpret_cast<const unsigned char*>(bytes.data()) + offset * 8;
    for (int64_t i = 0; i < count; ++i) {
      values[i] = read_f64_le(base + i * 8);
    }
    ckpt.blobs.emplace(entry.at("name").get<std::string>(),
                       std::move(values));
  }
  return ckpt;
}

std::string checkpoint_fingerprint(const std::filesystem::path& dir) {
  const std::string manifest = read_file_bytes(dir / kManifestName);
  const std::string blob = read_file_bytes(dir / kBlobName);
  uint64_t hash = fnv1a64(manifest);
  hash = fnv1a64(blob.data(), blob.size(), hash);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string file_fingerprint(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void write_matrix_le(const std::filesystem::path& path,
                     const Eigen::MatrixXd& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      write_f64_le(out, matrix(r, c));
    }
  }
}

Eigen::MatrixXd read_matrix_le(const std::filesystem::path& path, int64_t rows,
                               int64_t cols) {
  const std::string bytes = read_file_bytes(path);
  if (static_cast<int64_t>(bytes.size()) != rows * cols * 8) {
    throw ValidationError("matrix file " + path.string() +
                          " does not match its declared shape");
  }
  Eigen::MatrixXd matrix(rows, cols);
  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data());
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) {
      matrix(r, c) = read_f64_le(base + (r * cols + c) * 8);
    }
  }
  return matrix;
}

}  // namespace tabmia
