#pragma once

#include "agc/designs.hpp"
#include "agc/matrix.hpp"
#include "agc/rng.hpp"

#include <cstdint>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

namespace agc {

enum class Scheme { RandomDiagonal, NullspaceHadamard, Baseline };

std::string_view to_string(Scheme s) noexcept;

// Uniform law on [1-eps, 1+eps] U [-1-eps, -1+eps].
struct DiagonalLaw {
    double epsilon = 0.0;

    void validate() const;
};

enum class V1Policy { AllOnes, Gaussian };

std::string_view to_string(V1Policy p) noexcept;

struct DiagonalDraws {
    std::vector<std::vector<double>> d;  // d[i] is the diagonal of D_{i+1}
    double epsilon = 0.0;
};

struct NullspaceVectors {
    std::vector<std::vector<double>> v;  // v[j] is v_{j+1}
    V1Policy policy = V1Policy::AllOnes;
    bool pm1_requested = false;
    // The +-1 search did not succeed and v_2 came from the null-space basis.
    bool pm1_fallback = false;
};

using EncodingRandomness = std::variant<std::monostate, DiagonalDraws, NullspaceVectors>;

struct EncodingMatrix {
    Matrix b;  // mk x n
    int m = 1;
    std::shared_ptr<const AssignmentMatrix> parent;
    Scheme scheme = Scheme::Baseline;
    EncodingRandomness randomness;
    std::uint64_t seed = 0;

    std::size_t k() const noexcept { return parent->k(); }
    std::size_t n() const noexcept { return b.cols(); }
    // Rows i*k .. (i+1)*k - 1, zero-based block index.
    Matrix block(int i) const { return b.row_block(static_cast<std::size_t>(i) * k(), k()); }
};

std::vector<double> sample_diagonal(std::size_t n, const DiagonalLaw& law, Rng& rng);

EncodingMatrix encode_random_diagonal(std::shared_ptr<const AssignmentMatrix> a, int m,
                                      const DiagonalLaw& law, std::uint64_t seed);

EncodingMatrix encode_baseline(std::shared_ptr<const AssignmentMatrix> a, int m);

struct NullspaceOptions {
    V1Policy v1_policy = V1Policy::AllOnes;
    bool constrain_pm1 = false;
    std::uint64_t seed = 0;
    Tolerance tol{};
    // Budget for the +-1 search, counted in sign flips.
    int pm1_budget = 100000;
};

EncodingMatrix encode_nullspace_hadamard(std::shared_ptr<const AssignmentMatrix> a, int m,
                                         const NullspaceOptions& opts);

// Every block shares the support of the parent assignment.
bool verify_support(const EncodingMatrix& e);

// max_i ||B v_i - f_i||_inf for the null-space construction; throws for the
// other schemes.
double nullspace_exactness_gap(const EncodingMatrix& e);

}  // namespace agc
