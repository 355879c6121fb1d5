#include "agc/bounds.hpp"
#include "agc/designs.hpp"
#include "agc/encoders.hpp"
#include "agc/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

using namespace agc;

namespace {

std::shared_ptr<const AssignmentMatrix> fano() {
    return std::make_shared<const AssignmentMatrix>(bibd_transpose_from_difference_set({7, {0, 1, 3}}));
}

BibdParams p91() { return {91, 91, 10, 10, 1}; }

}  // namespace

TEST_CASE("c(epsilon)") {
    CHECK(compute_c(0.0) == 1.0);
    CHECK(compute_c(0.1) == doctest::Approx(1.013468).epsilon(1e-6));
    CHECK(compute_c(0.5) == doctest::Approx(1.444444).epsilon(1e-6));
    double prev = 0.0;
    for (double e = 0.0; e < 0.99; e += 0.07) {
        const double c = compute_c(e);
        CHECK(c >= 1.0);
        CHECK(c > prev);
        prev = c;
    }
    CHECK_THROWS_AS(compute_c(1.0), Error);
}

TEST_CASE("BIBD upper bound") {
    CHECK(bound_bibd(p91(), 2, 0).value == doctest::Approx(16.545454).epsilon(1e-6));
    CHECK(bound_bibd({7, 7, 3, 3, 1}, 1, 6).value == doctest::Approx(4.0));
    CHECK(bound_bibd({7, 7, 3, 3, 1}, 1, 7).value == doctest::Approx(7.0));
    CHECK_THROWS_AS(bound_bibd(p91(), 2, 92), Error);
    CHECK_THROWS_AS(bound_bibd(p91(), 2, -1), Error);
}

TEST_CASE("baseline closed form") {
    CHECK(baseline_bibd_error(p91(), 2, 0).value == doctest::Approx(91.0));
    CHECK(baseline_bibd_error({7, 7, 3, 3, 1}, 2, 0).value == doctest::Approx(7.0));
    CHECK(baseline_bibd_error({7, 7, 3, 3, 1}, 2, 7).value == doctest::Approx(14.0));
}

TEST_CASE("SRG upper bound") {
    const auto p = srg_paley(13);
    const auto& sp = std::get<SrgParams>(p.params);
    CHECK(bound_srg(sp, 1, 0).value == doctest::Approx(2.437).epsilon(1e-3));
    CHECK(bound_srg(sp, 2, 13).value == doctest::Approx(26.0));
}

TEST_CASE("coset upper bound") {
    CHECK(bound_coset({27, 2, 5, {0, 1, 2, 3, 4}}, 0, compute_c(0.1)).value == doctest::Approx(4.97).epsilon(1e-3));
    CHECK(bound_coset({3, 2, 1, {0}}, 0, 1.0).value == doctest::Approx(2.0));
}

TEST_CASE("Lemma 1 reduces to the closed forms") {
    const auto ds = builtin_difference_set(91);
    REQUIRE(ds);
    const auto a91 = bibd_transpose_from_difference_set(*ds);
    CHECK(bound_lemma1(a91, NonStragglerSet::full(91), 2, 1.0).value ==
          doctest::Approx(bound_bibd(p91(), 2, 0).value).epsilon(1e-9));
    // With s > 0 the BIBD form is exact for any set because A_F^T A_F depends only on |F|.
    CHECK(bound_lemma1(a91, NonStragglerSet::without(91, {3, 17, 40}), 2, 1.0).value ==
          doctest::Approx(bound_bibd(p91(), 2, 3).value).epsilon(1e-9));

    const CosetParams cp{27, 2, 5, {0, 1, 2, 3, 4}};
    const auto ac = coset_bipartite(cp);
    const double c = compute_c(0.1);
    CHECK(bound_lemma1(ac, NonStragglerSet::full(54), 2, c).value ==
          doctest::Approx(bound_coset(cp, 0, c).value).epsilon(1e-9));

    CHECK(bound_lemma1(*fano(), NonStragglerSet::empty(7), 2, 1.0).value == doctest::Approx(14.0));
    const auto mx = bound_lemma1_max(*fano(), 2, 1.0, 2, 50, 1);
    CHECK(mx.value >= bound_lemma1(*fano(), NonStragglerSet::without(7, {0, 1}), 2, 1.0).value - 1e-9);
}

TEST_CASE("lower bound examples") {
    const auto l5 = lower_bound(13, 13, 4, 2, 5);
    CHECK(l5.value == 2.0);
    const auto l3 = lower_bound(13, 13, 4, 2, 3);
    CHECK(l3.value == 1.0);
    CHECK(lower_bound(7, 7, 3, 2, 0).value == 0.0);
    CHECK(lower_bound(7, 7, 3, 1, 7).value == 2.0);
}

TEST_CASE("adversarial sets achieve the lower bound") {
    const auto a = fano();
    const auto e = encode_random_diagonal(a, 2, {0.0}, 3);
    for (int s = 0; s <= 7; ++s) {
        const auto worst = worst_adversarial(e, s);
        CHECK(worst.set.stragglers() == static_cast<std::size_t>(s));
        CHECK(worst.err >= lower_bound(7, 7, 3, 2, s).value - 1e-8);
    }
    const auto set = adversarial_straggler_set(*a, 2, 3, 1);
    CHECK(set.stragglers() == 3);
}

TEST_CASE("diagonal dominance bound dominates the decoding error") {
    const auto a = std::make_shared<const AssignmentMatrix>(biregular_random(40, 20, 3, 6, 1));
    NullspaceOptions opts;
    opts.constrain_pm1 = true;
    const auto e = encode_nullspace_hadamard(a, 2, opts);
    Rng rng = make_rng(2, {});
    std::vector<std::size_t> order(40);
    for (std::size_t i = 0; i < 40; ++i) order[i] = i;
    int checked = 0;
    for (int t = 0; t < 50; ++t) {
        std::shuffle(order.begin(), order.end(), rng);
        const NonStragglerSet set(40, std::vector<std::size_t>(order.begin(), order.begin() + 36));
        try {
            const double ub = bound_diag_dominant(e, set).value;
            CHECK(decode(e, set).err <= ub + 1e-9);
            ++checked;
        } catch (const Error& err) {
            CHECK(err.kind() == ErrorKind::Singular);
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("report echoes inputs") {
    const auto r = bound_bibd(p91(), 2, 5);
    CHECK(r.kind == BoundKind::BibdUpper);
    CHECK(r.input("s") == 5.0);
    CHECK(to_string(BoundKind::Lower) == "lower");
}
