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

#ifndef MLDP_SIMD_KERNELS_H_
#define MLDP_SIMD_KERNELS_H_

#include <cstddef>
#include <span>
#include "absl/strings/string_view.h"

// Dense double-precision kernels used by the channel, calibration and EM
// inner loops. Every kernel has a portable scalar reference; an AVX2+FMA
// variant is compiled on x86-64 and selected at runtime when the CPU supports
// it. The variants agree up to floating-point reassociation.

namespace mldp {
namespace simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, size_t n);
  // a[i] *= alpha
  void (*scale)(double alpha, double* a, size_t n);
};

namespace scalar {
double Dot(const double* a, const double* b, size_t n);
void Axpy(double alpha, const double* x, double* y, size_t n);
double Sum(const double* a, size_t n);
void Scale(double alpha, double* a, size_t n);
}  // namespace scalar

#if defined(MLDP_HAVE_AVX2)
namespace avx2 {
double Dot(const double* a, const double* b, size_t n);
void Axpy(double alpha, const double* x, double* y, size_t n);
double Sum(const double* a, size_t n);
void Scale(double alpha, double* a, size_t n);
}  // namespace avx2
#endif

// True when the AVX2 variant is compiled in and the running CPU supports it.
bool Avx2Available();

// Table for a specific ISA; falls back to scalar when `isa` is unavailable.
const KernelTable& Table(Isa isa);

// The table used by the library. Chosen once on first use: AVX2 when
// available unless the environment variable MLDP_SIMD=scalar is set.
const KernelTable& Active();

// Overrides the active table (tests and benchmarks).
void SetActive(Isa isa);

absl::string_view IsaName(Isa isa);

// Sets flush-to-zero and denormals-are-zero for the calling thread while in
// scope (x86 MXCSR; no-op elsewhere). Iterative updates whose entries decay
// toward zero otherwise slow down by orders of magnitude once they reach
// the subnormal range.
class ScopedFlushDenormals {
 public:
  ScopedFlushDenormals();
  ~ScopedFlushDenormals();
  ScopedFlushDenormals(const ScopedFlushDenormals&) = delete;
  ScopedFlushDenormals& operator=(const ScopedFlushDenormals&) = delete;

 private:
  unsigned int saved_ = 0;
};

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double Sum(std::span<const double> a) {
  return Active().sum(a.data(), a.size());
}
inline void Scale(double alpha, std::span<double> a) {
  Active().scale(alpha, a.data(), a.size());
}

}  // namespace simd
}  // namespace mldp

#endif  // MLDP_SIMD_KERNELS_H_
