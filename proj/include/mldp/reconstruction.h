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

#ifndef MLDP_RECONSTRUCTION_H_
#define MLDP_RECONSTRUCTION_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "mldp/channel.h"
#include "mldp/distribution.h"

namespace mldp {

struct EmOptions {
  // Stop once the L1 change between consecutive iterates drops below this.
  double l1_tol = 1e-9;
  int max_iter = 10000;
  // Keep the log-likelihood of every iterate in EmResult::trace.
  bool record_trace = false;
};

struct EmResult {
  Distribution estimate;
  // Number of update steps applied.
  int iterations = 0;
  bool converged = false;
  // L1 change of the last update step.
  double final_delta = 0.0;
  // Log-likelihood of `estimate`.
  double log_likelihood = 0.0;
  // Log-likelihood of the initial point and of each iterate, when requested.
  std::vector<double> trace;

  // iterations,converged,final_delta,log_likelihood,p0,...,p{n-1}
  std::string CsvHeader() const;
  std::string ToCsvRow() const;
};

// Iterative Bayesian update. With q the normalized noisy histogram and C the
// channel, iterates
//   pi'(x) = sum_y q(y) pi(x) C(x,y) / sum_x' pi(x') C(x',y)
// from `init` (uniform when absent). Entries of `init` that are zero stay
// zero. Only outputs y with q(y) > 0 enter the update, so each step costs
// |X| * |support(q)|.
//
// Errors: InvalidArgument on dimension mismatch, FailedPrecondition on an
// empty histogram or when an observed output has zero predicted mass.
// Hitting max_iter is reported through `converged`, not as an error.
absl::StatusOr<EmResult> EmReconstruct(
    const Channel& channel, const Histogram& noisy,
    const std::optional<Distribution>& init = std::nullopt,
    const EmOptions& options = {});

// sum_y counts[y] * ln(sum_x candidate(x) C(x,y)); -infinity when an
// observed output has zero predicted mass.
absl::StatusOr<double> LogLikelihood(const Channel& channel,
                                     const Histogram& noisy,
                                     const Distribution& candidate);

}  // namespace mldp

#endif  // MLDP_RECONSTRUCTION_H_
