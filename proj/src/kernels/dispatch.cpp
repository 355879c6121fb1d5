#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace agc::kernels {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable* avx2_table() noexcept {
#if defined(AGC_HAVE_AVX2)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return supported ? &detail::kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_table() noexcept {
#if defined(AGC_HAVE_NEON)
    return &detail::kNeonTable;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() noexcept {
    if (const char* env = std::getenv("AGC_ISA"); env && std::strcmp(env, "scalar") == 0)
        return &scalar_table();
    if (const auto* t = avx2_table()) return t;
    if (const auto* t = neon_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
    const KernelTable* t = nullptr;
    switch (isa) {
        case Isa::Scalar: t = &scalar_table(); break;
        case Isa::Avx2: t = avx2_table(); break;
        case Isa::Neon: t = neon_table(); break;
    }
    if (!t) return false;
    current().store(t, std::memory_order_relaxed);
    return true;
}

}  // namespace agc::kernels
