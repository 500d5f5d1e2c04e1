// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pvbf/simd.hpp"

namespace pvbf::simd::detail {

extern const KernelTable kScalarTable;
#if defined(PVBF_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(PVBF_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace pvbf::simd::detail
