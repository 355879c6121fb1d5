#include "agc/bounds.hpp"
#include "agc/decoder.hpp"
#include "agc/designs.hpp"
#include "agc/encoders.hpp"
#include "agc/error.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

using namespace agc;

namespace {

std::shared_ptr<const AssignmentMatrix> fano() {
    return std::make_shared<const AssignmentMatrix>(bibd_transpose_from_difference_set({7, {0, 1, 3}}));
}

std::shared_ptr<const AssignmentMatrix> coset27() {
    return std::make_shared<const AssignmentMatrix>(coset_bipartite({27, 2, 5, {0, 1, 2, 3, 4}}));
}

NonStragglerSet from_mask(std::size_t n, unsigned mask) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j)
        if (mask & (1u << j)) members.push_back(j);
    return NonStragglerSet(n, members);
}

// Err_F through an explicit projector built by Eigen on the surviving columns.
double eigen_err(const Matrix& b, std::size_t m, const NonStragglerSet& set) {
    const std::size_t rows = b.rows(), k = rows / m;
    Eigen::MatrixXd bf(rows, set.size());
    for (std::size_t c = 0; c < set.size(); ++c)
        for (std::size_t r = 0; r < rows; ++r) bf(r, c) = b(r, set.members()[c]);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(rows, m);
    for (std::size_t u = 0; u < m; ++u) f.block(u * k, u, k, 1).setOnes();
    if (set.size() == 0) return f.squaredNorm();
    const Eigen::MatrixXd x = bf.completeOrthogonalDecomposition().solve(f);
    return (bf * x - f).squaredNorm();
}

}  // namespace

TEST_CASE("target matrix") {
    const auto t1 = build_target(1, 1);
    CHECK(t1.f == Matrix::ones(1, 1));
    const auto t = build_target(3, 2);
    CHECK(t.f == Matrix::from_rows({{1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}, {0, 1}}));
    CHECK(frobenius_sq(build_target(27, 2).f) == 54.0);
}

TEST_CASE("non-straggler set") {
    const NonStragglerSet s(5, {4, 1, 2});
    CHECK(s.members() == std::vector<std::size_t>{1, 2, 4});
    CHECK(s.stragglers() == 2);
    CHECK(s.contains(4));
    CHECK_FALSE(s.contains(0));
    CHECK(NonStragglerSet::without(5, {0, 3}).members() == std::vector<std::size_t>{1, 2, 4});
    CHECK_THROWS_AS(NonStragglerSet(3, {0, 0}), Error);
    CHECK_THROWS_AS(NonStragglerSet(3, {3}), Error);
}

TEST_CASE("empty set decodes to mk") {
    const auto e = encode_random_diagonal(coset27(), 2, {0.1}, 3);
    const auto r = decode(e, NonStragglerSet::empty(54));
    CHECK(r.err == doctest::Approx(54.0));
    CHECK(max_abs(r.r) == 0.0);
}

TEST_CASE("full coset set decodes exactly") {
    const auto e = encode_random_diagonal(coset27(), 2, {0.1}, 11);
    const auto r = decode(e, NonStragglerSet::full(54));
    CHECK(r.err < 1e-8);
    CHECK(max_abs(matmul(e.b, r.r) - build_target(27, 2).f) < 1e-6);
}

TEST_CASE("Fano baseline error matches the closed form on every set") {
    const auto a = fano();
    const auto e = encode_baseline(a, 2);
    const auto& p = std::get<BibdParams>(a->params);
    for (unsigned mask = 0; mask < 128; ++mask) {
        const auto set = from_mask(7, mask);
        const double err = decode_error(e.b, 2, set);
        const int s = static_cast<int>(set.stragglers());
        CHECK(err == doctest::Approx(baseline_bibd_error(p, 2, s).value).epsilon(1e-10));
    }
}

TEST_CASE("decode agrees with the Eigen projector and the Gram formula") {
    const auto e = encode_random_diagonal(fano(), 2, {0.2}, 5);
    for (unsigned mask = 1; mask < 128; mask += 3) {
        const auto set = from_mask(7, mask);
        const double err = decode(e, set).err;
        CHECK(err == doctest::Approx(eigen_err(e.b, 2, set)).epsilon(1e-9).scale(1.0));
        CHECK(err == doctest::Approx(decode_error_gram(e.b, 2, set)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("decoding matrix is zero off the non-straggler set") {
    const auto e = encode_random_diagonal(coset27(), 2, {0.1}, 7);
    const auto set = NonStragglerSet::without(54, {0, 5, 30, 53});
    const auto r = decode(e, set);
    for (std::size_t j : {0u, 5u, 30u, 53u})
        for (std::size_t u = 0; u < 2; ++u) CHECK(r.r(j, u) == 0.0);
    CHECK(frobenius_sq(matmul(e.b, r.r) - build_target(27, 2).f) == doctest::Approx(r.err).epsilon(1e-9).scale(1.0));
}

TEST_CASE("error is monotone in the non-straggler set") {
    const auto e = encode_random_diagonal(coset27(), 2, {0.1}, 8);
    Rng rng = make_rng(4, {});
    std::vector<std::size_t> order(54);
    for (std::size_t i = 0; i < 54; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    double prev = 54.0 + 1e-9;
    for (std::size_t take = 0; take <= 54; take += 6) {
        const NonStragglerSet set(54, std::vector<std::size_t>(order.begin(), order.begin() + static_cast<long>(take)));
        const double err = decode_error(e.b, 2, set);
        CHECK(err <= prev + 1e-9);
        prev = err;
    }
}

TEST_CASE("row group identity") {
    const auto e = encode_random_diagonal(fano(), 3, {0.3}, 2);
    const auto set = NonStragglerSet::without(7, {2, 6});
    const auto dec = decode(e, set);
    const Matrix bc = e.b.select_columns(set.members());
    const Matrix rc = dec.r.select_rows(set.members());
    CHECK(row_group_error(bc, rc, 7, 3) == doctest::Approx(dec.err).epsilon(1e-9).scale(1.0));
}

TEST_CASE("gradient splitting") {
    const auto z = split_gradients({{1, 2, 3, 4}, {5, 6, 7, 8}}, 2);
    CHECK(z.z == Matrix::from_rows({{1, 5, 3, 7}, {2, 6, 4, 8}}));
    const auto padded = split_gradients({{1, 2, 3}}, 2);
    CHECK(padded.z == Matrix::from_rows({{1, 3}, {2, 0}}));
    CHECK(padded.d_padded == 4);
    CHECK(split_gradients({{1, 2, 3}}, 1).z == Matrix::from_rows({{1}, {2}, {3}}));
    CHECK_THROWS_AS(split_gradients({{1, 2}, {1}}, 2), Error);
}

TEST_CASE("reconstruction recovers the gradient sum when decoding is exact") {
    const auto e = encode_random_diagonal(coset27(), 2, {0.1}, 1);
    Rng rng = make_rng(9, {});
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> partials(27, std::vector<double>(9));
    std::vector<double> total(9, 0.0);
    for (auto& p : partials)
        for (std::size_t t = 0; t < 9; ++t) {
            p[t] = g(rng);
            total[t] += p[t];
        }
    const auto z = split_gradients(partials, 2);
    const auto rec = reconstruct(z, e, NonStragglerSet::full(54));
    const auto grad = assemble_gradient(rec.approx, 9);
    for (std::size_t t = 0; t < 9; ++t) CHECK(grad[t] == doctest::Approx(total[t]).epsilon(1e-8));

    // With stragglers the gap respects the spectral bound (reconstruct throws otherwise).
    const auto lossy = reconstruct(z, e, NonStragglerSet::without(54, {1, 2, 3, 40, 41}));
    CHECK(lossy.err > 0.0);
    const double zn = spectral_norm(z.z);
    CHECK(lossy.frob_gap * lossy.frob_gap <= zn * zn * lossy.err + 1e-8);
}
