#pragma once

// Dense double-precision inner-loop kernels. A scalar reference
// implementation is always built; vectorized variants (AVX2+FMA on x86-64,
// NEON on AArch64) are compiled in separate translation units and selected
// once at runtime. Setting AGC_ISA=scalar in the environment forces the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace agc::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
    Isa isa;
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x *= a
    void (*scale)(double a, double* x, std::size_t n);
    // Plane rotation: (x, y) <- (c*x - s*y, s*x + c*y)
    void (*rot)(double* x, double* y, std::size_t n, double c, double s);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled for this target or the CPU
// lacks the instructions.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

// The table used by all library code.
const KernelTable& active() noexcept;

// Override the selection (tests use this to compare variants). Returns false
// if the requested ISA is unavailable; the active table is unchanged then.
bool select(Isa isa) noexcept;

inline double dot(std::span<const double> x, std::span<const double> y) noexcept {
    return active().dot(x.data(), y.data(), x.size());
}
inline double sum_squares(std::span<const double> x) noexcept {
    return active().sum_squares(x.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
    active().axpy(a, x.data(), y.data(), x.size());
}
inline void scale(double a, std::span<double> x) noexcept {
    active().scale(a, x.data(), x.size());
}
inline void rot(std::span<double> x, std::span<double> y, double c, double s) noexcept {
    active().rot(x.data(), y.data(), x.size(), c, s);
}

}  // namespace agc::kernels
