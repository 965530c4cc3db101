#pragma once

#include "uqcpt/simd/kernels.hpp"

namespace uqcpt::simd::detail {

const KernelTable& scalar_kernels() noexcept;
#if defined(UQCPT_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

}  // namespace uqcpt::simd::detail
