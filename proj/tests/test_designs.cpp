#include "agc/designs.hpp"
#include "agc/error.hpp"

#include <doctest.h>

#include <set>

using namespace agc;

namespace {

// Brute-force pair coverage: every pair of workers shares exactly lambda subsets.
bool pairs_covered(const Matrix& m, int lambda) {
    for (std::size_t a = 0; a < m.cols(); ++a)
        for (std::size_t b = a + 1; b < m.cols(); ++b) {
            int shared = 0;
            for (std::size_t i = 0; i < m.rows(); ++i) shared += m(i, a) != 0 && m(i, b) != 0;
            if (shared != lambda) return false;
        }
    return true;
}

Matrix square(const Matrix& a) { return matmul(a, a); }

}  // namespace

TEST_CASE("Fano plane from {0,1,3} mod 7") {
    const auto a = bibd_transpose_from_difference_set({7, {0, 1, 3}});
    CHECK(a.k() == 7);
    CHECK(a.n() == 7);
    CHECK(a.delta == 3);
    CHECK(a.gamma == 3);
    CHECK(pairs_covered(a.mat, 1));
    const Matrix g = gram(a.mat);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) CHECK(g(i, j) == (i == j ? 3.0 : 1.0));
    const auto& p = std::get<BibdParams>(a.params);
    CHECK(validate_bibd(a, p).ok);
    CHECK(validate_assignment(a).ok);
}

TEST_CASE("(13,13,4,4,1) and the built-in 91-point design") {
    const auto a13 = bibd_transpose_from_difference_set({13, {0, 1, 3, 9}});
    CHECK(pairs_covered(a13.mat, 1));
    CHECK(validate_assignment(a13).ok);

    const auto ds = builtin_difference_set(91);
    REQUIRE(ds);
    CHECK(difference_set_lambda(*ds) == 1);
    const auto a91 = bibd_transpose_from_difference_set(*ds);
    const auto& p = std::get<BibdParams>(a91.params);
    CHECK(p.n == 91);
    CHECK(p.delta == 10);
    CHECK(p.lambda == 1);
    CHECK(validate_bibd(a91, p).ok);
}

TEST_CASE("planar difference set search agrees with the validator") {
    for (int q : {2, 3, 4, 5}) {
        const int v = q * q + q + 1;
        const auto ds = search_planar_difference_set(v, q + 1);
        REQUIRE(ds);
        CHECK(difference_set_lambda(*ds) == 1);
    }
    // No (43, 7, 1) set exists (order 6 plane).
    CHECK_FALSE(search_planar_difference_set(43, 7));
}

TEST_CASE("invalid difference set names the missing residue") {
    try {
        (void)bibd_transpose_from_difference_set({4, {0, 2}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("validate_bibd catches perturbations and delta <= lambda") {
    auto a = bibd_transpose_from_difference_set({7, {0, 1, 3}});
    const auto p = std::get<BibdParams>(a.params);
    a.mat(2, 5) = 1.0 - a.mat(2, 5);
    const auto rep = validate_bibd(a, p);
    CHECK_FALSE(rep.ok);
    CHECK(rep.first_violation.has_value());

    AssignmentMatrix ones{Matrix::ones(3, 3), 3, 3, Family::BibdTranspose, BibdParams{3, 3, 3, 3, 3}};
    const auto r2 = validate_bibd(ones, BibdParams{3, 3, 3, 3, 3});
    CHECK_FALSE(r2.ok);
}

TEST_CASE("Paley graphs") {
    const auto p13 = srg_paley(13);
    const auto& sp = std::get<SrgParams>(p13.params);
    CHECK(sp.n == 13);
    CHECK(sp.delta == 6);
    CHECK(sp.lambda == 2);
    CHECK(sp.mu == 3);
    CHECK(validate_srg(p13, sp).ok);

    // Brute-force SRG identity.
    const Matrix a2 = square(p13.mat);
    for (std::size_t i = 0; i < 13; ++i)
        for (std::size_t j = 0; j < 13; ++j) {
            const double expect = i == j ? 6 : (p13.mat(i, j) != 0 ? 2 : 3);
            CHECK(a2(i, j) == expect);
        }

    // Shift automorphism i -> i+1.
    for (std::size_t i = 0; i < 13; ++i)
        for (std::size_t j = 0; j < 13; ++j) CHECK(p13.mat(i, j) == p13.mat((i + 1) % 13, (j + 1) % 13));

    const auto p5 = srg_paley(5);
    const auto& s5 = std::get<SrgParams>(p5.params);
    CHECK(s5.delta == 2);
    CHECK(s5.lambda == 0);
    CHECK(s5.mu == 1);
    CHECK(validate_srg(p5, s5).ok);

    CHECK_THROWS_AS(srg_paley(7), Error);
    CHECK_THROWS_AS(srg_paley(21), Error);
}

TEST_CASE("validate_srg rejects complete graphs and removed edges") {
    Matrix k4 = Matrix::ones(4, 4);
    for (std::size_t i = 0; i < 4; ++i) k4(i, i) = 0;
    AssignmentMatrix a{k4, 3, 3, Family::SrgAdjacency, SrgParams{4, 3, 2, 0}};
    CHECK_FALSE(validate_srg(a, SrgParams{4, 3, 2, 0}).ok);

    auto p13 = srg_paley(13);
    const auto sp = std::get<SrgParams>(p13.params);
    p13.mat(0, 1) = p13.mat(1, 0) = 0;
    CHECK_FALSE(validate_srg(p13, sp).ok);
}

TEST_CASE("coset bipartite graphs") {
    const auto small = coset_bipartite({3, 2, 1, {0}});
    CHECK(small.k() == 3);
    CHECK(small.n() == 6);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t x = 0; x < 6; ++x) CHECK(small.mat(i, x) == ((x == i || x == i + 3) ? 1.0 : 0.0));

    const CosetParams p{27, 2, 5, {0, 1, 2, 3, 4}};
    const auto a = coset_bipartite(p);
    CHECK(a.k() == 27);
    CHECK(a.n() == 54);
    CHECK(a.gamma == 10);
    CHECK(a.delta == 5);
    CHECK(validate_assignment(a).ok);
    for (std::size_t i = 0; i < 27; ++i)
        for (std::size_t j = 0; j < 27; ++j) CHECK(a.mat(i, j) == a.mat(i, j + 27));
    const Matrix c = coset_base_block(p);
    for (std::size_t i = 0; i < 27; ++i)
        for (std::size_t j = 0; j < 27; ++j) CHECK(c(i, j) == a.mat(i, j));

    CHECK_THROWS_AS(coset_bipartite({3, 2, 2, {0}}), Error);
    CHECK_THROWS_AS(coset_bipartite({3, 2, 1, {3}}), Error);
}

TEST_CASE("coset base invertibility") {
    CHECK(coset_is_invertible_base({3, 2, 2, {0, 1}}));
    CHECK_FALSE(coset_is_invertible_base({4, 2, 2, {0, 1}}));
    CHECK(coset_is_invertible_base({9, 2, 5, {0, 1, 2, 4, 7}}));
    CHECK(coset_is_invertible_base({27, 2, 5, {0, 1, 2, 3, 4}}));
    // Any 5-subset of Z_27 works since 3 does not divide 5.
    CHECK(coset_is_invertible_base({27, 2, 5, {0, 3, 9, 13, 26}}));
}

TEST_CASE("random bi-regular graphs") {
    const auto a = biregular_random(40, 20, 3, 6, 1);
    CHECK(a.k() == 20);
    CHECK(a.n() == 40);
    CHECK(validate_regular(a).ok);
    for (std::size_t i = 0; i < 20; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < 40; ++j) s += a.mat(i, j);
        CHECK(s == 6);
    }
    CHECK(biregular_random(40, 20, 3, 6, 1).mat == a.mat);
    CHECK_FALSE(biregular_random(40, 20, 3, 6, 2).mat == a.mat);

    const auto b = biregular_random(4, 2, 1, 2, 5);
    CHECK(validate_regular(b).ok);
    CHECK_THROWS_AS(biregular_random(3, 2, 1, 2, 0), Error);
}

TEST_CASE("number theory helpers") {
    CHECK(is_prime(13));
    CHECK_FALSE(is_prime(91));
    CHECK_FALSE(is_prime(1));
    const auto qr = quadratic_residues(13);
    CHECK(std::set<int>(qr.begin(), qr.end()) == std::set<int>{1, 3, 4, 9, 10, 12});
}
