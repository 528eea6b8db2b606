// Copyright 2026 The DevPlace Authors
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

#include "devplace/parameter_store.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace devplace {

ParameterStore::ParameterStore(std::vector<double> initial,
                               const AdamOptions& options)
    : options_(options),
      size_(initial.size()),
      values_(std::make_shared<const std::vector<double>>(std::move(initial))),
      first_moment_(size_, 0.0),
      second_moment_(size_, 0.0) {}

ParameterStore::Snapshot ParameterStore::Read() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {values_, version_};
}

absl::StatusOr<int64_t> ParameterStore::ApplyAdam(
    std::span<const double> gradient) {
  std::lock_guard<std::mutex> lock(mu_);
  if (gradient.size() != size_) {
    ++rejected_;
    return absl::InvalidArgumentError(absl::StrCat(
        "gradient has ", gradient.size(), " entries, store has ", size_));
  }
  for (double g : gradient) {
    if (!std::isfinite(g)) {
      ++rejected_;
      return absl::InvalidArgumentError("non-finite gradient entry");
    }
  }
  const int64_t step = version_ + 1;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
  auto next = std::make_shared<std::vector<double>>(*values_);
  for (size_t i = 0; i < size_; ++i) {
    const double g = gradient[i];
    first_moment_[i] = b1 * first_moment_[i] + (1.0 - b1) * g;
    second_moment_[i] = b2 * second_moment_[i] + (1.0 - b2) * g * g;
    const double m_hat = first_moment_[i] / correction1;
    const double v_hat = second_moment_[i] / correction2;
    (*next)[i] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
  }
  values_ = std::move(next);
  version_ = step;
  return version_;
}

int64_t ParameterStore::version() const {
  std::lock_guard<std::mutex> lock(mu_);
  return version_;
}

int64_t ParameterStore::rejected_updates() const {
  std::lock_guard<std::mutex> lock(mu_);
  return rejected_;
}

}  // namespace devplace
