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

#include <atomic>
#include <cstdlib>
#include "absl/strings/string_view.h"

#include "mldp/simd/kernels.h"

#if defined(__x86_64__) || defined(_M_X64)
#include <xmmintrin.h>
#define MLDP_HAVE_MXCSR 1
#endif

namespace mldp {
namespace simd {

namespace {

constexpr KernelTable kScalarTable = {Isa::kScalar, &scalar::Dot,
                                      &scalar::Axpy, &scalar::Sum,
                                      &scalar::Scale};
#if defined(MLDP_HAVE_AVX2)
constexpr KernelTable kAvx2Table = {Isa::kAvx2, &avx2::Dot, &avx2::Axpy,
                                    &avx2::Sum, &avx2::Scale};
#endif

const KernelTable* DefaultTable() {
  const char* env = std::getenv("MLDP_SIMD");
  if (env != nullptr && absl::string_view(env) == "scalar") {
    return &kScalarTable;
  }
  return &Table(Isa::kAvx2);
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{DefaultTable()};
  return slot;
}

}  // namespace

bool Avx2Available() {
#if defined(MLDP_HAVE_AVX2)
  static const bool available = __builtin_cpu_supports("avx2") &&
                                __builtin_cpu_supports("fma");
  return available;
#else
  return false;
#endif
}

const KernelTable& Table(Isa isa) {
#if defined(MLDP_HAVE_AVX2)
  if (isa == Isa::kAvx2 && Avx2Available()) return kAvx2Table;
#endif
  (void)isa;
  return kScalarTable;
}

const KernelTable& Active() {
  return *ActiveSlot().load(std::memory_order_relaxed);
}

void SetActive(Isa isa) {
  ActiveSlot().store(&Table(isa), std::memory_order_relaxed);
}

ScopedFlushDenormals::ScopedFlushDenormals() {
#if defined(MLDP_HAVE_MXCSR)
  saved_ = _mm_getcsr();
  // FTZ (bit 15) and DAZ (bit 6).
  _mm_setcsr(saved_ | 0x8040u);
#endif
}

ScopedFlushDenormals::~ScopedFlushDenormals() {
#if defined(MLDP_HAVE_MXCSR)
  _mm_setcsr(saved_);
#endif
}

absl::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace simd
}  // namespace mldp
