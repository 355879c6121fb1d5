#include "agc/kernels.hpp"
#include "agc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace agc;
using namespace agc::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed, {7});
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<const KernelTable*> simd_tables() {
    std::vector<const KernelTable*> out;
    if (auto* t = avx2_table()) out.push_back(t);
    if (auto* t = neon_table()) out.push_back(t);
    return out;
}

}  // namespace

TEST_CASE("scalar table is always available") {
    CHECK(scalar_table().isa == Isa::Scalar);
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
    const auto* ref = &scalar_table();
    for (const auto* t : simd_tables()) {
        INFO("isa " << to_string(t->isa));
        // Lengths around the vector width and unroll boundaries.
        for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 100, 257}) {
            const auto x = random_vec(n, n);
            const auto y = random_vec(n, n + 1000);
            const double scale = 1.0 + static_cast<double>(n);
            CHECK(t->dot(x.data(), y.data(), n) == doctest::Approx(ref->dot(x.data(), y.data(), n)).epsilon(1e-13).scale(scale));
            CHECK(t->sum_squares(x.data(), n) ==
                  doctest::Approx(ref->sum_squares(x.data(), n)).epsilon(1e-13).scale(scale));

            auto y1 = y, y2 = y;
            t->axpy(0.75, x.data(), y1.data(), n);
            ref->axpy(0.75, x.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

            auto x1 = x, x2 = x;
            t->scale(-1.5, x1.data(), n);
            ref->scale(-1.5, x2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);

            auto a1 = x, b1 = y, a2 = x, b2 = y;
            t->rot(a1.data(), b1.data(), n, 0.6, 0.8);
            ref->rot(a2.data(), b2.data(), n, 0.6, 0.8);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(a1[i] == doctest::Approx(a2[i]).epsilon(1e-15));
                CHECK(b1[i] == doctest::Approx(b2[i]).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("runtime selection can force the scalar path") {
    const Isa before = active().isa;
    CHECK(select(Isa::Scalar));
    CHECK(active().isa == Isa::Scalar);
    const std::vector<double> x{1, 2, 3}, y{4, 5, 6};
    CHECK(dot(x, y) == 32.0);
    CHECK(sum_squares(x) == 14.0);
    select(before);
    CHECK(active().isa == before);
}

TEST_CASE("rot is a plane rotation") {
    std::vector<double> x{1, 0}, y{0, 1};
    rot(x, y, 0.0, 1.0);
    CHECK(x[0] == doctest::Approx(0.0));
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(-1.0));
}
