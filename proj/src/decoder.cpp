#include "agc/decoder.hpp"

#include "agc/error.hpp"
#include "agc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace agc {

TargetMatrix build_target(std::size_t k, std::size_t m) {
    require(k >= 1 && m >= 1, ErrorKind::InvalidArgument, "target matrix needs k, m >= 1");
    Matrix f(m * k, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < k; ++r) f(i * k + r, i) = 1.0;
    return {std::move(f), k, m};
}

NonStragglerSet::NonStragglerSet(std::size_t n, std::vector<std::size_t> members)
    : n_(n), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    require(std::adjacent_find(members_.begin(), members_.end()) == members_.end(),
            ErrorKind::InvalidArgument, "non-straggler set has duplicate workers");
    require(members_.empty() || members_.back() < n_, ErrorKind::InvalidArgument,
            "non-straggler index out of range");
}

NonStragglerSet NonStragglerSet::full(std::size_t n) {
    std::vector<std::size_t> all(n);
    for (std::size_t j = 0; j < n; ++j) all[j] = j;
    return NonStragglerSet(n, std::move(all));
}

NonStragglerSet NonStragglerSet::without(std::size_t n, const std::vector<std::size_t>& stragglers) {
    std::vector<bool> gone(n, false);
    for (auto s : stragglers) {
        require(s < n, ErrorKind::InvalidArgument, "straggler index out of range");
        gone[s] = true;
    }
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < n; ++j)
        if (!gone[j]) keep.push_back(j);
    return NonStragglerSet(n, std::move(keep));
}

bool NonStragglerSet::contains(std::size_t j) const noexcept {
    return std::binary_search(members_.begin(), members_.end(), j);
}

namespace {

void check_shapes(const Matrix& b, std::size_t m, const NonStragglerSet& set) {
    require(m >= 1 && b.rows() % m == 0, ErrorKind::DimensionMismatch,
            "B has " + std::to_string(b.rows()) + " rows, not a multiple of m = " + std::to_string(m));
    require(set.n() == b.cols(), ErrorKind::DimensionMismatch,
            "non-straggler set is over " + std::to_string(set.n()) + " workers, B has " +
                std::to_string(b.cols()) + " columns");
}

}  // namespace

DecodeResult decode(const Matrix& b, std::size_t m, const NonStragglerSet& set, const Tolerance& tol) {
    check_shapes(b, m, set);
    const auto target = build_target(b.rows() / m, m);
    DecodeResult out{Matrix(b.cols(), m), 0.0};
    const Matrix bf = b.select_columns(set.members());
    auto ls = solve_least_squares(bf, target.f, tol, true);
    out.err = ls.residual;
    for (std::size_t t = 0; t < set.size(); ++t)
        for (std::size_t i = 0; i < m; ++i) out.r(set.members()[t], i) = ls.solution(t, i);
    return out;
}

DecodeResult decode(const EncodingMatrix& e, const NonStragglerSet& set, const Tolerance& tol) {
    return decode(e.b, static_cast<std::size_t>(e.m), set, tol);
}

double decode_error(const Matrix& b, std::size_t m, const NonStragglerSet& set, const Tolerance& tol) {
    check_shapes(b, m, set);
    const auto target = build_target(b.rows() / m, m);
    return solve_least_squares(b.select_columns(set.members()), target.f, tol, false).residual;
}

double decode_error_gram(const Matrix& b, std::size_t m, const NonStragglerSet& set) {
    check_shapes(b, m, set);
    const std::size_t k = b.rows() / m;
    const Matrix bf = b.select_columns(set.members());
    const Matrix g = gram(bf);
    double err = static_cast<double>(m * k);
    for (std::size_t i = 0; i < m; ++i) {
        // B_F^T f_i is the column sums of block i restricted to F.
        std::vector<double> rhs(set.size(), 0.0);
        for (std::size_t r = 0; r < k; ++r) kernels::axpy(1.0, bf.row(i * k + r), rhs);
        const auto x = solve_spd(g, rhs);
        err -= kernels::dot(rhs, x);
    }
    return err;
}

double row_group_error(const Matrix& b_c, const Matrix& r, std::size_t k, std::size_t m) {
    require(b_c.rows() == m * k && b_c.cols() == r.rows() && r.cols() == m,
            ErrorKind::DimensionMismatch, "row_group_error: shape mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::size_t> rows(m);
        for (std::size_t j = 0; j < m; ++j) rows[j] = j * k + i;
        const Matrix diff = matmul(b_c.select_rows(rows), r) - Matrix::identity(m);
        total += frobenius_sq(diff);
    }
    return total;
}

GradientBlockMatrix split_gradients(const std::vector<std::vector<double>>& partials, std::size_t m) {
    require(!partials.empty(), ErrorKind::InvalidArgument, "split_gradients needs k >= 1 partial gradients");
    require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
    const std::size_t k = partials.size();
    const std::size_t d = partials.front().size();
    for (const auto& g : partials)
        require(g.size() == d, ErrorKind::DimensionMismatch, "partial gradients differ in length");
    const std::size_t block = (d + m - 1) / m;
    GradientBlockMatrix out{Matrix(block, m * k), d, block * m, k, m};
    for (std::size_t u = 0; u < m; ++u)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t t = 0; t < block; ++t) {
                const std::size_t src = u * block + t;
                out.z(t, u * k + i) = src < d ? partials[i][src] : 0.0;
            }
    return out;
}

Reconstruction reconstruct(const GradientBlockMatrix& z, const EncodingMatrix& e,
                           const NonStragglerSet& set, const Tolerance& tol) {
    require(z.z.cols() == e.b.rows() && z.m == static_cast<std::size_t>(e.m), ErrorKind::DimensionMismatch,
            "gradient block matrix does not match the encoding matrix");
    const DecodeResult dec = decode(e, set, tol);
    const Matrix zb = matmul(z.z, e.b);
    Reconstruction out{matmul(zb, dec.r), 0.0, dec.err};
    const Matrix exact = matmul(z.z, build_target(z.k, z.m).f);
    out.frob_gap = std::sqrt(frobenius_sq(out.approx - exact));
    const double znorm = spectral_norm(z.z);
    const double lhs = out.frob_gap * out.frob_gap;
    const double rhs = znorm * znorm * dec.err;
    if (lhs > rhs + 1e-8 * (1.0 + rhs + frobenius_sq(z.z)))
        fail(ErrorKind::Validation, "reconstruction gap " + std::to_string(lhs) +
                                        " exceeds ||Z||_2^2 Err = " + std::to_string(rhs));
    return out;
}

std::vector<double> assemble_gradient(const Matrix& approx, std::size_t d) {
    const std::size_t block = approx.rows();
    require(block * approx.cols() >= d, ErrorKind::DimensionMismatch, "assemble_gradient: too short");
    std::vector<double> g(d);
    for (std::size_t idx = 0; idx < d; ++idx) g[idx] = approx(idx % block, idx / block);
    return g;
}

}  // namespace agc
