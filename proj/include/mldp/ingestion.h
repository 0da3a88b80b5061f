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

#ifndef MLDP_INGESTION_H_
#define MLDP_INGESTION_H_

#include <istream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mldp/distribution.h"
#include "mldp/metric_space.h"
#include "mldp/random.h"

namespace mldp {

// One Gowalla-format record: user, check-in time, latitude, longitude,
// location id, tab-separated. Only the coordinates are interpreted.
struct CheckIn {
  std::string user;
  std::string timestamp;
  double lat = 0.0;
  double lon = 0.0;
  std::string location_id;

  friend bool operator==(const CheckIn&, const CheckIn&) = default;
};

struct ParsedCheckIns {
  std::vector<CheckIn> checkins;
  // 1-based line numbers of malformed lines.
  std::vector<size_t> rejected_lines;
};

// Parses one line (without terminator; a trailing '\r' is ignored). Fails on
// a wrong field count, unparseable coordinates, or coordinates out of range.
absl::StatusOr<CheckIn> ParseCheckInLine(absl::string_view line);

// Tab-separated line that ParseCheckInLine maps back to an equal record.
std::string FormatCheckIn(const CheckIn& checkin);

// Reads the whole stream. Per-line failures are collected in
// rejected_lines; only a stream read failure is an error.
absl::StatusOr<ParsedCheckIns> ParseCheckIns(std::istream& in);

struct CellAssignment {
  // In-bounds records, in input order.
  std::vector<PointId> cells;
  size_t out_of_bounds = 0;
};

CellAssignment ToCells(std::span<const CheckIn> checkins, const GridSpec& spec);

// A random sample of records in a fixed random order, consumed in cumulative
// slices of `step` records. The last slice is the full sample when its size
// is not a multiple of `step`.
class PrefixSequence {
 public:
  PrefixSequence(std::vector<PointId> cell_ids, size_t step)
      : cell_ids_(std::move(cell_ids)), step_(step) {}

  const std::vector<PointId>& cell_ids() const { return cell_ids_; }
  size_t step() const { return step_; }
  size_t num_prefixes() const { return (cell_ids_.size() + step_ - 1) / step_; }
  // Records in prefix k (0-based): min((k + 1) * step, sample size).
  size_t prefix_size(size_t k) const;
  std::span<const PointId> prefix(size_t k) const {
    return std::span<const PointId>(cell_ids_).first(prefix_size(k));
  }

  friend bool operator==(const PrefixSequence&,
                         const PrefixSequence&) = default;

 private:
  std::vector<PointId> cell_ids_;
  size_t step_;
};

// Samples `sample_size` records without replacement (partial Fisher-Yates)
// and fixes their order. FailedPrecondition ("InsufficientData") when fewer
// records are available.
absl::StatusOr<PrefixSequence> MakePrefixes(std::span<const PointId> cells,
                                            size_t sample_size, size_t step,
                                            Rng& rng);

}  // namespace mldp

#endif  // MLDP_INGESTION_H_
