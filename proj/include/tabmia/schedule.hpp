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

#ifndef TABMIA_SCHEDULE_HPP_
#define TABMIA_SCHEDULE_HPP_

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tabmia {

enum class ScheduleKind { kLinear, kCosine };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

// Discrete-time noise schedule: per-step variances beta_t for t = 1..T with
// derived alpha_t = 1 - beta_t and the cumulative product alpha_bar_t.
// Timestep 0 is clean data, so alpha_bar(0) == 1 and beta/alpha are defined
// only for t >= 1. Immutable after construction.
class NoiseSchedule {
 public:
  // beta_t interpolated linearly from beta_start (t=1) to beta_end (t=T).
  static NoiseSchedule linear(int timesteps, double beta_start,
                              double beta_end);

  // alpha_bar_t = g(t)/g(0) with g(t) = cos^2(((t/T + offset)/(1 + offset)) *
  // pi/2). The implied beta_t is clipped to at most 0.999 and alpha_bar is
  // rebuilt from the clipped betas so the cumulative-product recurrence holds
  // exactly.
  static NoiseSchedule cosine(int timesteps, double offset);

  ScheduleKind kind() const { return kind_; }
  int timesteps() const { return timesteps_; }

  double beta(int t) const;       // t in [1, T]
  double alpha(int t) const;      // t in [1, T]
  double alpha_bar(int t) const;  // t in [0, T]

  struct Step {
    double beta;
    double alpha;
    double alpha_bar;
  };
  // All three values at t; requires t >= 1 since beta(0) does not exist.
  Step at(int t) const;

  // Construction parameters, for checkpoint manifests.
  nlohmann::json params_json() const;
  static NoiseSchedule from_params_json(const nlohmann::json& params);

 private:
  NoiseSchedule() = default;
  void rebuild_from_beta();
  void check_time_index(int t, int lowest) const;

  ScheduleKind kind_ = ScheduleKind::kLinear;
  int timesteps_ = 0;
  // Construction parameters, echoed into manifests.
  double beta_start_ = 0.0;
  double beta_end_ = 0.0;
  double cosine_offset_ = 0.0;
  std::vector<double> beta_;       // index 1..T (slot 0 unused)
  std::vector<double> alpha_;      // index 1..T (slot 0 unused)
  std::vector<double> alpha_bar_;  // index 0..T
};

}  // namespace tabmia

#endif  // TABMIA_SCHEDULE_HPP_
