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

#include "mldp/distribution.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"

namespace mldp {

Histogram::Histogram(std::vector<uint64_t> counts)
    : counts_(std::move(counts)),
      total_(std::accumulate(counts_.begin(), counts_.end(), uint64_t{0})) {}

absl::StatusOr<Histogram> Histogram::FromCells(std::span<const PointId> cells,
                                               size_t size) {
  Histogram histogram(size);
  for (PointId id : cells) {
    if (id >= size) {
      return absl::OutOfRangeError(
          absl::StrCat("cell id ", id, " outside space of size ", size));
    }
    histogram.Add(id);
  }
  return histogram;
}

void Histogram::Add(PointId id, uint64_t count) {
  counts_[id] += count;
  total_ += count;
}

absl::StatusOr<Distribution> Distribution::Create(std::vector<double> probs,
                                                  double tolerance) {
  if (probs.empty()) {
    return absl::InvalidArgumentError("distribution must be nonempty");
  }
  double total = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid probability ", probs[i], " at index ", i));
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > tolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", total, ", expected 1"));
  }
  return Distribution(std::move(probs));
}

Distribution Distribution::Uniform(size_t size) {
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Distribution Distribution::PointMass(size_t size, PointId at) {
  std::vector<double> probs(size, 0.0);
  probs[at] = 1.0;
  return Distribution(std::move(probs));
}

absl::StatusOr<Distribution> Normalize(const Histogram& histogram) {
  if (histogram.total() == 0) {
    return absl::FailedPreconditionError("empty histogram");
  }
  const double total = static_cast<double>(histogram.total());
  std::vector<double> probs(histogram.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    probs[i] = static_cast<double>(histogram[i]) / total;
  }
  return Distribution::Create(std::move(probs));
}

double L1Distance(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total;
}

}  // namespace mldp
