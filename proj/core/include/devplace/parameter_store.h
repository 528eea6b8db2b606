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

#ifndef DEVPLACE_PARAMETER_STORE_H_
#define DEVPLACE_PARAMETER_STORE_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace devplace {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Authoritative copy of the policy parameters shared by all controllers, with
// Adam moment state. Reads hand out immutable snapshots; each accepted update
// swaps in a new vector and bumps the version by one.
class ParameterStore {
 public:
  struct Snapshot {
    std::shared_ptr<const std::vector<double>> values;
    int64_t version = 0;
  };

  ParameterStore(std::vector<double> initial, const AdamOptions& options);

  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  Snapshot Read() const;

  // theta <- theta - lr * m_hat / (sqrt(v_hat) + eps), with bias-corrected
  // moments. Returns the new version. Gradients of the wrong length or with
  // non-finite entries are rejected; a rejection leaves the store untouched
  // and is counted.
  absl::StatusOr<int64_t> ApplyAdam(std::span<const double> gradient);

  int64_t version() const;
  int64_t rejected_updates() const;
  size_t size() const { return size_; }

 private:
  const AdamOptions options_;
  const size_t size_;
  mutable std::mutex mu_;
  std::shared_ptr<const std::vector<double>> values_;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
  int64_t version_ = 0;
  int64_t rejected_ = 0;
};

}  // namespace devplace

#endif  // DEVPLACE_PARAMETER_STORE_H_
