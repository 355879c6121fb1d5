#pragma once

#include "agc/encoders.hpp"
#include "agc/matrix.hpp"

#include <cstddef>
#include <vector>

namespace agc {

// F = [f_1 | ... | f_m], f_i the indicator of rows i*k .. (i+1)*k - 1.
struct TargetMatrix {
    Matrix f;
    std::size_t k = 0;
    std::size_t m = 0;
};

TargetMatrix build_target(std::size_t k, std::size_t m);

// Surviving workers, sorted and duplicate-free.
class NonStragglerSet {
public:
    NonStragglerSet() = default;
    NonStragglerSet(std::size_t n, std::vector<std::size_t> members);

    static NonStragglerSet full(std::size_t n);
    static NonStragglerSet empty(std::size_t n) { return NonStragglerSet(n, {}); }
    // Complement of the given straggler indices.
    static NonStragglerSet without(std::size_t n, const std::vector<std::size_t>& stragglers);

    std::size_t n() const noexcept { return n_; }
    const std::vector<std::size_t>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::size_t stragglers() const noexcept { return n_ - members_.size(); }
    bool contains(std::size_t j) const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> members_;
};

struct DecodeResult {
    Matrix r;  // n x m, zero outside the non-straggler set
    double err = 0.0;
};

DecodeResult decode(const EncodingMatrix& e, const NonStragglerSet& set, const Tolerance& tol = {});
DecodeResult decode(const Matrix& b, std::size_t m, const NonStragglerSet& set,
                    const Tolerance& tol = {});

// Err_F(B) only, skipping the decoding matrix.
double decode_error(const Matrix& b, std::size_t m, const NonStragglerSet& set,
                    const Tolerance& tol = {});

// Err_F(B) through the explicit Gram inverse (normal equations). Only valid
// when B_F^T B_F is invertible; kept as an independent check of decode.
double decode_error_gram(const Matrix& b, std::size_t m, const NonStragglerSet& set);

// sum_i ||B^(i) R - I_m||_F^2, B^(i) = rows {i, k+i, ..., (m-1)k+i} of B_C.
double row_group_error(const Matrix& b_c, const Matrix& r, std::size_t k, std::size_t m);

// Z = [G[1] | ... | G[m]] with G[u](:, i) = block u of g_i, blocks padded
// with trailing zeros to length ceil(d/m).
struct GradientBlockMatrix {
    Matrix z;
    std::size_t d = 0;         // original gradient length
    std::size_t d_padded = 0;  // m * ceil(d / m)
    std::size_t k = 0;
    std::size_t m = 0;
};

GradientBlockMatrix split_gradients(const std::vector<std::vector<double>>& partials, std::size_t m);

struct Reconstruction {
    Matrix approx;  // (d_padded/m) x m = Z B R
    double frob_gap = 0.0;
    double err = 0.0;
};

// Computes Z B R and checks ||Z B R - Z F||_F^2 <= ||Z||_2^2 ||B R - F||_F^2.
Reconstruction reconstruct(const GradientBlockMatrix& z, const EncodingMatrix& e,
                           const NonStragglerSet& set, const Tolerance& tol = {});

// Column u of approx is block u of the gradient; returns the first d entries.
std::vector<double> assemble_gradient(const Matrix& approx, std::size_t d);

}  // namespace agc
