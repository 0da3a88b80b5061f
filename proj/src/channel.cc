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

#include "mldp/channel.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "mldp/simd/kernels.h"

namespace mldp {

namespace {

constexpr double kRowSumTolerance = 1e-9;

absl::Status CheckEpsilon(double epsilon) {
  if (!(epsilon >= 0.0) || std::isnan(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be nonnegative, got ", epsilon));
  }
  return absl::OkStatus();
}

// Normalizes each row of a row-major weight matrix in place.
void NormalizeRows(std::vector<double>& weights, size_t n) {
  for (size_t x = 0; x < n; ++x) {
    std::span<double> row(weights.data() + x * n, n);
    simd::Scale(1.0 / simd::Sum(row), row);
  }
}

// Sum of exp(-epsilon * |offset|) over the midpoint samples of a cell whose
// center sits (dc * cell_w, dr * cell_h) away from the density center.
// Indexed by (|dr|, |dc|).
std::vector<double> CellIntegralTable(double epsilon, double cell_w,
                                      double cell_h, size_t max_dr,
                                      size_t max_dc, int samples) {
  const size_t width = max_dc + 1;
  std::vector<double> table((max_dr + 1) * width);
  std::vector<double> frac(samples);
  for (int k = 0; k < samples; ++k) {
    frac[k] = (k + 0.5) / samples - 0.5;
  }
  const double sample_area = cell_w * cell_h / (samples * samples);
  for (size_t dr = 0; dr <= max_dr; ++dr) {
    for (size_t dc = 0; dc <= max_dc; ++dc) {
      double acc = 0.0;
      for (double fy : frac) {
        const double oy = (static_cast<double>(dr) + fy) * cell_h;
        for (double fx : frac) {
          const double ox = (static_cast<double>(dc) + fx) * cell_w;
          acc += std::exp(-epsilon * std::hypot(ox, oy));
        }
      }
      table[dr * width + dc] = acc * sample_area;
    }
  }
  return table;
}

size_t AbsDiff(size_t a, size_t b) { return a > b ? a - b : b - a; }

}  // namespace

// Wraps matrices that are row-stochastic by construction.
class ChannelBuilder {
 public:
  static Channel Make(std::shared_ptr<const MetricSpace> space,
                      std::vector<double> matrix, Mechanism mechanism,
                      double epsilon) {
    return Channel(std::move(space), std::move(matrix), mechanism, epsilon);
  }
};

absl::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kFlat:
      return "flat";
    case Mechanism::kGeometric:
      return "geometric";
    case Mechanism::kDiscretizedLaplacian:
      return "laplacian";
    case Mechanism::kCustom:
      return "custom";
  }
  return "unknown";
}

absl::StatusOr<Mechanism> ParseMechanism(absl::string_view name) {
  for (Mechanism m : {Mechanism::kFlat, Mechanism::kGeometric,
                      Mechanism::kDiscretizedLaplacian, Mechanism::kCustom}) {
    if (name == MechanismName(m)) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", name,
                   "' (expected flat, geometric, laplacian or custom)"));
}

absl::StatusOr<Channel> Channel::FromMatrix(
    std::shared_ptr<const MetricSpace> space, std::vector<double> matrix,
    Mechanism mechanism, double epsilon) {
  if (space == nullptr) {
    return absl::InvalidArgumentError("channel requires a metric space");
  }
  const size_t n = space->size();
  if (matrix.size() != n * n) {
    return absl::InvalidArgumentError(
        absl::StrCat("channel matrix has ", matrix.size(),
                     " entries, expected ", n * n));
  }
  for (size_t x = 0; x < n; ++x) {
    double total = 0.0;
    for (size_t y = 0; y < n; ++y) {
      const double p = matrix[x * n + y];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        return absl::InvalidArgumentError(
            absl::StrCat("invalid channel entry (", x, ",", y, ") = ", p));
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kRowSumTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("channel row ", x, " sums to ", total));
    }
  }
  return Channel(std::move(space), std::move(matrix), mechanism, epsilon);
}

Channel Channel::Identity(std::shared_ptr<const MetricSpace> space) {
  const size_t n = space->size();
  std::vector<double> matrix(n * n, 0.0);
  for (size_t x = 0; x < n; ++x) matrix[x * n + x] = 1.0;
  return Channel(std::move(space), std::move(matrix), Mechanism::kCustom,
                 std::numeric_limits<double>::infinity());
}

absl::StatusOr<Channel> BuildFlat(std::shared_ptr<const MetricSpace> space,
                                  double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  const size_t n = space->size();
  if (n < 2) {
    return absl::InvalidArgumentError(
        "flat mechanism needs at least two points");
  }
  // Divide through by e^eps so large epsilon does not overflow.
  const double off_weight = std::exp(-epsilon);
  const double denom = 1.0 + static_cast<double>(n - 1) * off_weight;
  const double diagonal = 1.0 / denom;
  const double off = off_weight / denom;
  std::vector<double> matrix(n * n, off);
  for (size_t x = 0; x < n; ++x) matrix[x * n + x] = diagonal;
  return ChannelBuilder::Make(std::move(space), std::move(matrix), Mechanism::kFlat,
                 epsilon);
}

absl::StatusOr<Channel> BuildGeometric(
    std::shared_ptr<const MetricSpace> space, double epsilon) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  const size_t n = space->size();
  std::vector<double> matrix(n * n);
  const std::span<const double> dist = space->matrix();
  for (size_t i = 0; i < matrix.size(); ++i) {
    matrix[i] = std::exp(-epsilon * dist[i]);
  }
  NormalizeRows(matrix, n);
  return ChannelBuilder::Make(std::move(space), std::move(matrix), Mechanism::kGeometric,
                 epsilon);
}

absl::StatusOr<Channel> BuildDiscretizedLaplacian(
    std::shared_ptr<const MetricSpace> space, const GridSpec& spec,
    double epsilon, const LaplacianOptions& options) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (!space->grid().has_value() || !(*space->grid() == spec)) {
    return absl::InvalidArgumentError(
        "metric space was not built from the given grid spec");
  }
  if (options.samples_per_axis < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "samples_per_axis must be positive, got ", options.samples_per_axis));
  }
  const bool plane =
      options.normalization == LaplacianNormalization::kPlaneClamped;
  if (plane && epsilon == 0.0) {
    return absl::InvalidArgumentError(
        "plane normalization needs a positive epsilon");
  }
  const size_t n = space->size();
  const double cell_w = spec.cell_width_m();
  const double cell_h = spec.cell_height_m();

  // Padding (in cells) beyond which the plane density is below ~1e-13 of its
  // peak; capped so tiny epsilons stay tractable.
  size_t pad = 0;
  if (plane) {
    const double reach = 30.0 / (epsilon * std::min(cell_w, cell_h));
    pad = static_cast<size_t>(std::min(
        std::ceil(reach), 4.0 * static_cast<double>(std::max(spec.rows,
                                                             spec.cols))));
  }
  const size_t max_dr = spec.rows - 1 + pad;
  const size_t max_dc = spec.cols - 1 + pad;
  const std::vector<double> table = CellIntegralTable(
      epsilon, cell_w, cell_h, max_dr, max_dc, options.samples_per_axis);
  const size_t width = max_dc + 1;

  std::vector<double> matrix(n * n, 0.0);
  for (size_t x = 0; x < n; ++x) {
    const size_t r0 = x / spec.cols;
    const size_t c0 = x % spec.cols;
    double* out = matrix.data() + x * n;
    if (!plane) {
      for (size_t r = 0; r < spec.rows; ++r) {
        const double* trow = table.data() + AbsDiff(r, r0) * width;
        for (size_t c = 0; c < spec.cols; ++c) {
          out[r * spec.cols + c] = trow[AbsDiff(c, c0)];
        }
      }
      continue;
    }
    // Walk the padded grid in signed coordinates and clamp each cell onto
    // the nearest in-grid cell.
    const long long ipad = static_cast<long long>(pad);
    const long long rows = static_cast<long long>(spec.rows);
    const long long cols = static_cast<long long>(spec.cols);
    for (long long r = -ipad; r < rows + ipad; ++r) {
      const size_t dr = static_cast<size_t>(std::llabs(r - (long long)r0));
      const size_t rr = static_cast<size_t>(std::clamp(r, 0LL, rows - 1));
      const double* trow = table.data() + dr * width;
      for (long long c = -ipad; c < cols + ipad; ++c) {
        const size_t dc = static_cast<size_t>(std::llabs(c - (long long)c0));
        const size_t cc = static_cast<size_t>(std::clamp(c, 0LL, cols - 1));
        out[rr * spec.cols + cc] += trow[dc];
      }
    }
  }
  NormalizeRows(matrix, n);
  return ChannelBuilder::Make(std::move(space), std::move(matrix),
                 Mechanism::kDiscretizedLaplacian, epsilon);
}

namespace {

// Index of the first entry whose running total exceeds u; falls back to the
// last positive entry when rounding leaves the total just below u.
PointId InvertRow(std::span<const double> row, double u) {
  double cumulative = 0.0;
  PointId last_positive = 0;
  for (PointId y = 0; y < row.size(); ++y) {
    if (row[y] > 0.0) last_positive = y;
    cumulative += row[y];
    if (u < cumulative && row[y] > 0.0) return y;
  }
  return last_positive;
}

}  // namespace

absl::StatusOr<PointId> Sample(const Channel& channel, PointId x, Rng& rng) {
  if (x >= channel.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "true value ", x, " outside channel of size ", channel.size()));
  }
  return InvertRow(channel.row(x), rng.UniformDouble());
}

ChannelSampler::ChannelSampler(const Channel& channel)
    : size_(channel.size()),
      cumulative_(channel.matrix().size()),
      last_positive_(channel.size(), 0) {
  for (size_t x = 0; x < size_; ++x) {
    const std::span<const double> row = channel.row(x);
    double cumulative = 0.0;
    for (size_t y = 0; y < size_; ++y) {
      if (row[y] > 0.0) last_positive_[x] = y;
      cumulative += row[y];
      cumulative_[x * size_ + y] = cumulative;
    }
  }
}

PointId ChannelSampler::Sample(PointId x, Rng& rng) const {
  const double u = rng.UniformDouble();
  const double* begin = cumulative_.data() + x * size_;
  const double* end = begin + size_;
  // First y with u < cumulative[y]; a zero-probability entry never has a
  // strictly larger cumulative than its predecessor, so it is skipped.
  const double* it = std::upper_bound(begin, end, u);
  if (it != end) return static_cast<PointId>(it - begin);
  // Rounding left the row total at or below u.
  return last_positive_[x];
}

std::vector<PointId> ChannelSampler::SanitizeAll(
    std::span<const PointId> records, Rng& rng) const {
  std::vector<PointId> noisy;
  noisy.reserve(records.size());
  for (PointId x : records) noisy.push_back(Sample(x, rng));
  return noisy;
}

absl::StatusOr<double> DxPrivacyViolation(const Channel& channel,
                                          double epsilon,
                                          const MetricSpace& metric) {
  const size_t n = channel.size();
  if (metric.size() != n) {
    return absl::InvalidArgumentError(
        absl::StrCat("metric has ", metric.size(), " points, channel has ", n));
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> logs(n * n);
  const std::span<const double> m = channel.matrix();
  for (size_t i = 0; i < logs.size(); ++i) {
    logs[i] = m[i] > 0.0 ? std::log(m[i]) : -kInf;
  }
  double worst = 0.0;
  for (size_t x = 0; x < n; ++x) {
    const double* lx = logs.data() + x * n;
    for (size_t xp = 0; xp < n; ++xp) {
      if (xp == x) continue;
      const double* lxp = logs.data() + xp * n;
      const double bound = epsilon * metric.distance(x, xp);
      for (size_t y = 0; y < n; ++y) {
        if (lx[y] == -kInf) continue;  // ratio 0 or 0/0
        if (lxp[y] == -kInf) return kInf;
        worst = std::max(worst, lx[y] - lxp[y] - bound);
      }
    }
  }
  return worst;
}

double DxPrivacyViolation(const Channel& channel, double epsilon) {
  return *DxPrivacyViolation(channel, epsilon, channel.space());
}

}  // namespace mldp
