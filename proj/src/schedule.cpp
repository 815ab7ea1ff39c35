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

#include "tabmia/schedule.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "tabmia/errors.hpp"

namespace tabmia {

namespace {
constexpr double kBetaClip = 0.999;
}  // namespace

std::string to_string(ScheduleKind kind) {
  return kind == ScheduleKind::kLinear ? "linear" : "cosine";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "linear") return ScheduleKind::kLinear;
  if (name == "cosine") return ScheduleKind::kCosine;
  throw ValidationError("unknown schedule kind '" + name + "'");
}

NoiseSchedule NoiseSchedule::linear(int timesteps, double beta_start,
                                    double beta_end) {
  if (timesteps < 2) {
    throw ValidationError("schedule needs at least 2 timesteps, got " +
                          std::to_string(timesteps));
  }
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
    throw ValidationError("linear schedule requires 0 < beta_start <= "
                          "beta_end < 1");
  }
  NoiseSchedule sched;
  sched.kind_ = ScheduleKind::kLinear;
  sched.timesteps_ = timesteps;
  sched.beta_start_ = beta_start;
  sched.beta_end_ = beta_end;
  sched.beta_.assign(timesteps + 1, 0.0);
  for (int t = 1; t <= timesteps; ++t) {
    sched.beta_[t] = beta_start + (beta_end - beta_start) *
                                      static_cast<double>(t - 1) /
                                      static_cast<double>(timesteps - 1);
  }
  sched.rebuild_from_beta();
  return sched;
}

NoiseSchedule NoiseSchedule::cosine(int timesteps, double offset) {
  if (timesteps < 2) {
    throw ValidationError("schedule needs at least 2 timesteps, got " +
                          std::to_string(timesteps));
  }
  if (!(offset > 0.0)) {
    throw ValidationError("cosine schedule offset must be positive");
  }
  NoiseSchedule sched;
  sched.kind_ = ScheduleKind::kCosine;
  sched.timesteps_ = timesteps;
  sched.cosine_offset_ = offset;

  const auto g = [timesteps, offset](int t) {
    const double arg = (static_cast<double>(t) / timesteps + offset) /
                       (1.0 + offset) * M_PI / 2.0;
    const double c = std::cos(arg);
    return c * c;
  };
  const double g0 = g(0);
  sched.beta_.assign(timesteps + 1, 0.0);
  double prev_bar = 1.0;
  for (int t = 1; t <= timesteps; ++t) {
    const double bar = g(t) / g0;
    double beta = 1.0 - bar / prev_bar;
    if (beta > kBetaClip) beta = kBetaClip;
    sched.beta_[t] = beta;
    prev_bar = bar;
  }
  // alpha_bar is rebuilt from the clipped betas rather than taken from the
  // closed form, so the cumulative-product recurrence is exact.
  sched.rebuild_from_beta();
  return sched;
}

void NoiseSchedule::rebuild_from_beta() {
  alpha_.assign(timesteps_ + 1, 0.0);
  alpha_bar_.assign(timesteps_ + 1, 0.0);
  alpha_bar_[0] = 1.0;
  for (int t = 1; t <= timesteps_; ++t) {
    alpha_[t] = 1.0 - beta_[t];
    alpha_bar_[t] = alpha_bar_[t - 1] * alpha_[t];
  }
}

void NoiseSchedule::check_time_index(int t, int lowest) const {
  if (t < lowest || t > timesteps_) {
    throw ValidationError("timestep " + std::to_string(t) +
                          " outside valid range [" + std::to_string(lowest) +
                          ", " + std::to_string(timesteps_) + "]");
  }
}

double NoiseSchedule::beta(int t) const {
  check_time_index(t, 1);
  return beta_[t];
}

double NoiseSchedule::alpha(int t) const {
  check_time_index(t, 1);
  return alpha_[t];
}

double NoiseSchedule::alpha_bar(int t) const {
  check_time_index(t, 0);
  return alpha_bar_[t];
}

NoiseSchedule::Step NoiseSchedule::at(int t) const {
  check_time_index(t, 1);
  return Step{beta_[t], alpha_[t], alpha_bar_[t]};
}

nlohmann::json NoiseSchedule::params_json() const {
  nlohmann::json params;
  params["kind"] = to_string(kind_);
  params["timesteps"] = timesteps_;
  if (kind_ == ScheduleKind::kLinear) {
    params["beta_start"] = beta_start_;
    params["beta_end"] = beta_end_;
  } else {
    params["s"] = cosine_offset_;
  }
  return params;
}

NoiseSchedule NoiseSchedule::from_params_json(const nlohmann::json& params) {
  const auto kind = schedule_kind_from_string(params.at("kind"));
  const int timesteps = params.at("timesteps");
  if (kind == ScheduleKind::kLinear) {
    return linear(timesteps, params.at("beta_start"), params.at("beta_end"));
  }
  return cosine(timesteps, params.at("s"));
}

}  // namespace tabmia
