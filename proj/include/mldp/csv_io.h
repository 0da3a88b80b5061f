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

#ifndef MLDP_CSV_IO_H_
#define MLDP_CSV_IO_H_

#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "mldp/channel.h"
#include "mldp/distribution.h"
#include "mldp/metric_space.h"

// Plain-text formats shared by the command-line tool. Lines starting with
// '#' are comments and are skipped by every reader.

namespace mldp {

// "# mechanism=<name> epsilon=<eps> size=<n>" then one comma-separated row
// of the matrix per line, 17 significant digits.
std::string FormatChannelCsv(const Channel& channel);
absl::StatusOr<Channel> ParseChannelCsv(
    std::istream& in, std::shared_ptr<const MetricSpace> space);

// Header "cell,count", one row per cell.
std::string FormatHistogramCsv(const Histogram& histogram);
// Accepts any subset of cells in any order; missing cells count 0.
absl::StatusOr<Histogram> ParseHistogramCsv(std::istream& in, size_t size);

// Header "cell", one id per line.
std::string FormatCellList(std::span<const PointId> cells);
absl::StatusOr<std::vector<PointId>> ParseCellList(std::istream& in);

}  // namespace mldp

#endif  // MLDP_CSV_IO_H_
