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

#include "mldp/reconstruction.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "mldp/simd/kernels.h"
#include "mldp/status_macros.h"

namespace mldp {

namespace {

absl::Status CheckDimensions(const Channel& channel, const Histogram& noisy) {
  if (noisy.size() != channel.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("histogram has ", noisy.size(), " cells, channel has ",
                     channel.size()));
  }
  return absl::OkStatus();
}

// Channel columns restricted to the observed outputs, stored row-major as
// |X| x |support| so both EM passes run over contiguous memory.
struct ObservedColumns {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> weights;  // q(y) for each observed y
  std::vector<double> counts;
  std::vector<double> matrix;

  std::span<const double> row(size_t x) const {
    return {matrix.data() + x * cols, cols};
  }
};

ObservedColumns Restrict(const Channel& channel, const Histogram& noisy) {
  ObservedColumns out;
  out.rows = channel.size();
  std::vector<PointId> support;
  for (PointId y = 0; y < noisy.size(); ++y) {
    if (noisy[y] > 0) support.push_back(y);
  }
  out.cols = support.size();
  const double total = static_cast<double>(noisy.total());
  for (PointId y : support) {
    out.counts.push_back(static_cast<double>(noisy[y]));
    out.weights.push_back(static_cast<double>(noisy[y]) / total);
  }
  out.matrix.resize(out.rows * out.cols);
  for (size_t x = 0; x < out.rows; ++x) {
    const std::span<const double> row = channel.row(x);
    double* dst = out.matrix.data() + x * out.cols;
    for (size_t k = 0; k < support.size(); ++k) dst[k] = row[support[k]];
  }
  return out;
}

// predicted[k] = sum_x pi(x) C(x, y_k)
void Predict(const ObservedColumns& cols, std::span<const double> pi,
             std::vector<double>& predicted) {
  predicted.assign(cols.cols, 0.0);
  for (size_t x = 0; x < cols.rows; ++x) {
    if (pi[x] == 0.0) continue;
    simd::Axpy(pi[x], cols.row(x), predicted);
  }
}

double LogLikelihoodOf(const ObservedColumns& cols,
                       std::span<const double> predicted) {
  double ll = 0.0;
  for (size_t k = 0; k < cols.cols; ++k) {
    if (predicted[k] <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += cols.counts[k] * std::log(predicted[k]);
  }
  return ll;
}

}  // namespace

std::string EmResult::CsvHeader() const {
  std::string header = "iterations,converged,final_delta,log_likelihood";
  for (size_t i = 0; i < estimate.size(); ++i) absl::StrAppend(&header, ",p", i);
  return header;
}

std::string EmResult::ToCsvRow() const {
  std::string row = absl::StrFormat("%d,%d,%.17g,%.17g", iterations,
                                    converged ? 1 : 0, final_delta,
                                    log_likelihood);
  for (double p : estimate.probs()) absl::StrAppend(&row, absl::StrFormat(",%.17g", p));
  return row;
}

absl::StatusOr<EmResult> EmReconstruct(const Channel& channel,
                                       const Histogram& noisy,
                                       const std::optional<Distribution>& init,
                                       const EmOptions& options) {
  MLDP_RETURN_IF_ERROR(CheckDimensions(channel, noisy));
  if (noisy.total() == 0) {
    return absl::FailedPreconditionError("empty histogram");
  }
  if (init.has_value() && init->size() != channel.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("initial estimate has ", init->size(),
                     " entries, channel has ", channel.size()));
  }
  const ObservedColumns cols = Restrict(channel, noisy);
  const size_t n = channel.size();
  const simd::ScopedFlushDenormals flush_denormals;

  const Distribution start = init.value_or(Distribution::Uniform(n));
  std::vector<double> pi(start.probs().begin(), start.probs().end());
  std::vector<double> next(n);
  std::vector<double> predicted;
  std::vector<double> next_predicted(cols.cols);
  std::vector<double> ratio(cols.cols);

  EmResult result{.estimate = start, .trace = {}};
  Predict(cols, pi, predicted);
  while (true) {
    for (size_t k = 0; k < cols.cols; ++k) {
      if (!(predicted[k] > 0.0)) {
        return absl::FailedPreconditionError(absl::StrCat(
            "observed output has zero predicted mass at iteration ",
            result.iterations));
      }
      ratio[k] = cols.weights[k] / predicted[k];
    }
    if (options.record_trace) {
      result.trace.push_back(LogLikelihoodOf(cols, predicted));
    }
    if (result.converged || result.iterations >= options.max_iter) break;

    // One sweep over the rows: the update of pi(x) and its contribution to
    // the next prediction are computed while the row is hot in cache.
    std::fill(next_predicted.begin(), next_predicted.end(), 0.0);
    for (size_t x = 0; x < n; ++x) {
      if (pi[x] == 0.0) {
        next[x] = 0.0;
        continue;
      }
      const std::span<const double> row = cols.row(x);
      next[x] = pi[x] * simd::Dot(row, ratio);
      simd::Axpy(next[x], row, next_predicted);
    }
    const double scale = 1.0 / simd::Sum(next);
    simd::Scale(scale, next);
    simd::Scale(scale, next_predicted);
    result.final_delta = L1Distance(next, pi);
    pi.swap(next);
    predicted.swap(next_predicted);
    ++result.iterations;
    result.converged = result.final_delta < options.l1_tol;
  }
  result.log_likelihood = LogLikelihoodOf(cols, predicted);
  MLDP_ASSIGN_OR_RETURN(result.estimate,
                        Distribution::Create(std::move(pi), 1e-9));
  return result;
}

absl::StatusOr<double> LogLikelihood(const Channel& channel,
                                     const Histogram& noisy,
                                     const Distribution& candidate) {
  MLDP_RETURN_IF_ERROR(CheckDimensions(channel, noisy));
  if (candidate.size() != channel.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("candidate has ", candidate.size(),
                     " entries, channel has ", channel.size()));
  }
  const ObservedColumns cols = Restrict(channel, noisy);
  std::vector<double> predicted;
  Predict(cols, candidate.probs(), predicted);
  return LogLikelihoodOf(cols, predicted);
}

}  // namespace mldp
