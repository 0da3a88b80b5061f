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

#include "mldp/csv_io.h"

#include <charconv>
#include <cmath>
#include "absl/strings/string_view.h"

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "mldp/status_macros.h"

namespace mldp {

namespace {

// Yields (line number, trimmed line) for non-empty, non-comment lines.
template <typename Fn>
absl::Status ForEachDataLine(std::istream& in, Fn&& fn) {
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text.front() == '#') continue;
    MLDP_RETURN_IF_ERROR(fn(number, text));
  }
  if (in.bad()) return absl::DataLossError("stream read failure");
  return absl::OkStatus();
}

template <typename T>
absl::StatusOr<T> ParseNumber(absl::string_view text, size_t line) {
  text = absl::StripAsciiWhitespace(text);
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line, ": cannot parse number '", text, "'"));
  }
  return value;
}

absl::Status ExpectHeader(absl::string_view text, absl::string_view header,
                          size_t line, bool& seen) {
  if (seen) return absl::OkStatus();
  seen = true;
  if (text != header) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", line, ": expected header '", header, "', got '", text, "'"));
  }
  return absl::OkStatus();
}

}  // namespace

std::string FormatChannelCsv(const Channel& channel) {
  std::string out = absl::StrFormat("# mechanism=%s epsilon=%.17g size=%d\n",
                                    MechanismName(channel.mechanism()),
                                    channel.epsilon(), channel.size());
  for (PointId x = 0; x < channel.size(); ++x) {
    const std::span<const double> row = channel.row(x);
    for (size_t y = 0; y < row.size(); ++y) {
      absl::StrAppendFormat(&out, y == 0 ? "%.17g" : ",%.17g", row[y]);
    }
    out.push_back('\n');
  }
  return out;
}

absl::StatusOr<Channel> ParseChannelCsv(
    std::istream& in, std::shared_ptr<const MetricSpace> space) {
  Mechanism mechanism = Mechanism::kCustom;
  double epsilon = 0.0;
  std::vector<double> matrix;
  size_t rows = 0;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      for (absl::string_view token : absl::StrSplit(text.substr(1), ' ',
                                                   absl::SkipEmpty())) {
        if (absl::ConsumePrefix(&token, "mechanism=")) {
          MLDP_ASSIGN_OR_RETURN(mechanism, ParseMechanism(token));
        } else if (absl::ConsumePrefix(&token, "epsilon=")) {
          MLDP_ASSIGN_OR_RETURN(epsilon, ParseNumber<double>(token, number));
        }
      }
      continue;
    }
    for (absl::string_view field : absl::StrSplit(text, ',')) {
      MLDP_ASSIGN_OR_RETURN(const double p, ParseNumber<double>(field, number));
      matrix.push_back(p);
    }
    ++rows;
    if (matrix.size() != rows * space->size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", number, ": expected ", space->size(), " columns"));
    }
  }
  if (in.bad()) return absl::DataLossError("stream read failure");
  return Channel::FromMatrix(std::move(space), std::move(matrix), mechanism,
                             epsilon);
}

std::string FormatHistogramCsv(const Histogram& histogram) {
  std::string out = "cell,count\n";
  for (PointId id = 0; id < histogram.size(); ++id) {
    absl::StrAppend(&out, id, ",", histogram[id], "\n");
  }
  return out;
}

absl::StatusOr<Histogram> ParseHistogramCsv(std::istream& in, size_t size) {
  Histogram histogram(size);
  bool header = false;
  MLDP_RETURN_IF_ERROR(ForEachDataLine(
      in, [&](size_t line, absl::string_view text) -> absl::Status {
        if (!header) return ExpectHeader(text, "cell,count", line, header);
        const std::vector<absl::string_view> fields = absl::StrSplit(text, ',');
        if (fields.size() != 2) {
          return absl::InvalidArgumentError(
              absl::StrCat("line ", line, ": expected cell,count"));
        }
        MLDP_ASSIGN_OR_RETURN(const size_t cell,
                              ParseNumber<size_t>(fields[0], line));
        MLDP_ASSIGN_OR_RETURN(const uint64_t count,
                              ParseNumber<uint64_t>(fields[1], line));
        if (cell >= size) {
          return absl::OutOfRangeError(absl::StrCat(
              "line ", line, ": cell ", cell, " outside space of size ", size));
        }
        histogram.Add(cell, count);
        return absl::OkStatus();
      }));
  return histogram;
}

std::string FormatCellList(std::span<const PointId> cells) {
  std::string out = "cell\n";
  for (PointId id : cells) absl::StrAppend(&out, id, "\n");
  return out;
}

absl::StatusOr<std::vector<PointId>> ParseCellList(std::istream& in) {
  std::vector<PointId> cells;
  bool header = false;
  MLDP_RETURN_IF_ERROR(ForEachDataLine(
      in, [&](size_t line, absl::string_view text) -> absl::Status {
        if (!header) return ExpectHeader(text, "cell", line, header);
        MLDP_ASSIGN_OR_RETURN(const size_t cell, ParseNumber<size_t>(text, line));
        cells.push_back(cell);
        return absl::OkStatus();
      }));
  return cells;
}

}  // namespace mldp
