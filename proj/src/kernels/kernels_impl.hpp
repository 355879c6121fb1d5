#pragma once

#include "agc/kernels.hpp"

namespace agc::kernels::detail {

#if defined(AGC_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(AGC_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace agc::kernels::detail
