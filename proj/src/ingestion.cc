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

#include "mldp/ingestion.h"

#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"

namespace mldp {

namespace {

bool ParseDouble(absl::string_view text, double& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

absl::StatusOr<CheckIn> ParseCheckInLine(absl::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::vector<absl::string_view> fields = absl::StrSplit(line, '\t');
  if (fields.size() != 5) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected 5 tab-separated fields, got ", fields.size()));
  }
  CheckIn checkin{.user = std::string(fields[0]),
                  .timestamp = std::string(fields[1]),
                  .location_id = std::string(fields[4])};
  if (!ParseDouble(fields[2], checkin.lat) ||
      !ParseDouble(fields[3], checkin.lon)) {
    return absl::InvalidArgumentError("unparseable coordinates");
  }
  if (checkin.lat < -90.0 || checkin.lat > 90.0 || checkin.lon < -180.0 ||
      checkin.lon > 180.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "coordinates out of range: ", checkin.lat, ", ", checkin.lon));
  }
  return checkin;
}

std::string FormatCheckIn(const CheckIn& checkin) {
  return absl::StrFormat("%s\t%s\t%.17g\t%.17g\t%s", checkin.user,
                         checkin.timestamp, checkin.lat, checkin.lon,
                         checkin.location_id);
}

absl::StatusOr<ParsedCheckIns> ParseCheckIns(std::istream& in) {
  ParsedCheckIns parsed;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    absl::StatusOr<CheckIn> checkin = ParseCheckInLine(line);
    if (checkin.ok()) {
      parsed.checkins.push_back(*std::move(checkin));
    } else {
      parsed.rejected_lines.push_back(line_number);
    }
  }
  if (in.bad()) {
    return absl::DataLossError(
        absl::StrCat("read failure after line ", line_number));
  }
  return parsed;
}

CellAssignment ToCells(std::span<const CheckIn> checkins,
                       const GridSpec& spec) {
  CellAssignment out;
  for (const CheckIn& checkin : checkins) {
    if (const auto cell = Locate(spec, checkin.lat, checkin.lon)) {
      out.cells.push_back(*cell);
    } else {
      ++out.out_of_bounds;
    }
  }
  return out;
}

size_t PrefixSequence::prefix_size(size_t k) const {
  return std::min((k + 1) * step_, cell_ids_.size());
}

absl::StatusOr<PrefixSequence> MakePrefixes(std::span<const PointId> cells,
                                            size_t sample_size, size_t step,
                                            Rng& rng) {
  if (step == 0 || sample_size == 0) {
    return absl::InvalidArgumentError("sample_size and step must be positive");
  }
  if (sample_size > cells.size()) {
    return absl::FailedPreconditionError(
        absl::StrCat("InsufficientData: requested ", sample_size,
                     " records, only ", cells.size(), " available"));
  }
  std::vector<PointId> pool(cells.begin(), cells.end());
  for (size_t i = 0; i < sample_size; ++i) {
    const size_t j = i + rng.UniformIndex(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(sample_size);
  return PrefixSequence(std::move(pool), step);
}

}  // namespace mldp
