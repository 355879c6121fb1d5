#include "agc/decoder.hpp"
#include "agc/error.hpp"
#include "agc/experiments.hpp"
#include "agc/parallel.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace agc;

namespace {

AssignmentSpec fano_spec() { return BibdSpec{{7, {0, 1, 3}}}; }

}  // namespace

TEST_CASE("straggler models") {
    Rng rng = make_rng(1, {});
    CHECK(sample_straggler_set(StragglerModel::bernoulli(0.0), 54, rng).size() == 54);
    CHECK(sample_straggler_set(StragglerModel::fixed(54), 54, rng).size() == 0);
    CHECK(sample_straggler_set(StragglerModel::fixed(5), 54, rng).stragglers() == 5);
    double total = 0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) total += static_cast<double>(sample_straggler_set(StragglerModel::bernoulli(0.25), 54, rng).size());
    CHECK(std::abs(total / draws - 40.5) < 0.5);
    CHECK_THROWS_AS(sample_straggler_set(StragglerModel::fixed(55), 54, rng), Error);
    CHECK_THROWS_AS(sample_straggler_set(StragglerModel::bernoulli(1.5), 54, rng), Error);
}

TEST_CASE("exhaustive sweep of the Fano baseline is exact") {
    SweepConfig cfg;
    cfg.assignment = fano_spec();
    cfg.scheme = {Scheme::Baseline, 0.0, V1Policy::AllOnes, false};
    cfg.grid = {0, 1, 2, 3};
    cfg.exhaustive = true;
    cfg.seed = 4;
    const auto rows = sweep_error(cfg);
    REQUIRE(rows.size() == 4);
    const BibdParams p{7, 7, 3, 3, 1};
    for (const auto& r : rows) {
        const double expect = baseline_bibd_error(p, 2, static_cast<int>(r.x)).value;
        CHECK(r.mean_err == doctest::Approx(expect).epsilon(1e-10));
        CHECK(r.min_err == doctest::Approx(expect).epsilon(1e-10));
        CHECK(r.max_err == doctest::Approx(expect).epsilon(1e-10));
        CHECK(r.upper_bound == doctest::Approx(expect).epsilon(1e-10));
        CHECK(r.family == "bibd");
    }
    CHECK(rows[2].samples == 21);
}

TEST_CASE("sampled sweep is deterministic and thread independent") {
    SweepConfig cfg;
    cfg.assignment = fano_spec();
    cfg.scheme = {Scheme::RandomDiagonal, 0.0, V1Policy::AllOnes, false};
    cfg.grid = {1, 3};
    cfg.matrix_draws = 4;
    cfg.set_draws = 10;
    cfg.seed = 12;
    cfg.threads = 1;
    const auto a = sweep_error(cfg);
    cfg.threads = 4;
    const auto b = sweep_error(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_err == b[i].mean_err);
        CHECK(a[i].std_err == b[i].std_err);
        CHECK(a[i].samples == 40);
        CHECK(a[i].min_err <= a[i].mean_err);
        CHECK(a[i].mean_err <= a[i].max_err);
    }
    cfg.seed = 13;
    CHECK(sweep_error(cfg)[0].mean_err != a[0].mean_err);
}

TEST_CASE("error is invariant to column sign flips") {
    const auto a = build_assignment(fano_spec());
    auto e = build_encoding({Scheme::RandomDiagonal, 0.2, V1Policy::AllOnes, false}, a, 2, 3);
    const auto set = NonStragglerSet::without(7, {1, 4});
    const double before = decode(e, set).err;
    for (std::size_t r = 0; r < e.b.rows(); ++r) {
        e.b(r, 2) = -e.b(r, 2);
        e.b(r, 5) = -e.b(r, 5);
    }
    CHECK(decode(e, set).err == doctest::Approx(before).epsilon(1e-10));
}

TEST_CASE("upper bound selection") {
    const auto fano = build_assignment(fano_spec());
    const SchemeSpec rd0{Scheme::RandomDiagonal, 0.0, V1Policy::AllOnes, false};
    CHECK(scheme_upper_bound(*fano, rd0, 2, 2, 10, 1) == doctest::Approx(bound_bibd({7, 7, 3, 3, 1}, 2, 2).value));
    const SchemeSpec base{Scheme::Baseline, 0.0, V1Policy::AllOnes, false};
    CHECK(scheme_upper_bound(*fano, base, 2, 2, 10, 1) == doctest::Approx(baseline_bibd_error({7, 7, 3, 3, 1}, 2, 2).value));
    const SchemeSpec ns{Scheme::NullspaceHadamard, 0.0, V1Policy::AllOnes, false};
    CHECK(std::isnan(scheme_upper_bound(*fano, ns, 2, 2, 10, 1)));

    const CosetParams cp{27, 2, 5, {0, 1, 2, 3, 4}};
    const auto coset = build_assignment(cp);
    const SchemeSpec rd1{Scheme::RandomDiagonal, 0.1, V1Policy::AllOnes, false};
    CHECK(scheme_upper_bound(*coset, rd1, 2, 3, 10, 1) == doctest::Approx(bound_coset(cp, 3, compute_c(0.1)).value));
}

TEST_CASE("unbiasedness estimate on the Fano plane") {
    const auto a = build_assignment(fano_spec());
    const SchemeSpec rd0{Scheme::RandomDiagonal, 0.0, V1Policy::AllOnes, false};
    const auto est = estimate_unbiasedness(a, rd0, 2, 0.25, 2000, 5);
    CHECK(est.trials == 2000);
    CHECK_FALSE(est.flagged);
    CHECK(est.beta_hat > 0.0);
    CHECK(est.rel_residual < 0.1);
    const auto again = estimate_unbiasedness(a, rd0, 2, 0.25, 2000, 5, {}, 3);
    CHECK(again.beta_hat == est.beta_hat);
}

TEST_CASE("parallel_for covers every index and propagates exceptions") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }, 3),
                    std::runtime_error);
    CHECK(default_threads() >= 1);
}
