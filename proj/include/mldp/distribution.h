// Copyright 2026 The mldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MLDP_DISTRIBUTION_H_
#define MLDP_DISTRIBUTION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "mldp/metric_space.h"

namespace mldp {

// Integer counts per point of a metric space.
class Histogram {
 public:
  explicit Histogram(size_t size) : counts_(size, 0) {}
  explicit Histogram(std::vector<uint64_t> counts);

  // Counts occurrences of each id; ids must be < size.
  static absl::StatusOr<Histogram> FromCells(std::span<const PointId> cells,
                                             size_t size);

  void Add(PointId id, uint64_t count = 1);

  size_t size() const { return counts_.size(); }
  uint64_t total() const { return total_; }
  uint64_t operator[](PointId id) const { return counts_[id]; }
  std::span<const uint64_t> counts() const { return counts_; }

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::vector<uint64_t> counts_;
  uint64_t total_ = 0;
};

// A probability vector over the points of a metric space.
class Distribution {
 public:
  // Entries must be finite, nonnegative and sum to 1 within `tolerance`.
  static absl::StatusOr<Distribution> Create(std::vector<double> probs,
                                             double tolerance = 1e-9);
  static Distribution Uniform(size_t size);
  static Distribution PointMass(size_t size, PointId at);

  size_t size() const { return probs_.size(); }
  double operator[](PointId id) const { return probs_[id]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

// probs[i] = counts[i] / total. FailedPrecondition ("empty histogram") when
// the total is zero.
absl::StatusOr<Distribution> Normalize(const Histogram& histogram);

double L1Distance(std::span<const double> a, std::span<const double> b);

}  // namespace mldp

#endif  // MLDP_DISTRIBUTION_H_
