// Acceptance checks AC1..AC9. One PASS/FAIL line per criterion; exit code 1
// if any check fails.
#include "agc/bounds.hpp"
#include "agc/decoder.hpp"
#include "agc/designs.hpp"
#include "agc/encoders.hpp"
#include "agc/error.hpp"
#include "agc/experiments.hpp"
#include "agc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

using namespace agc;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void run(const char* id, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = fn();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s %s (%.2fs)\n", id, out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

const DifferenceSet kFano{7, {0, 1, 3}};
const CosetParams kCoset{27, 2, 5, {0, 1, 2, 3, 4}};

// Visits every subset of {0..n-1} of the given size.
void for_each_subset(std::size_t n, std::size_t size, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        fn(idx);
        std::size_t i = size;
        while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
}

Outcome ac1() {
    const auto a = std::make_shared<const AssignmentMatrix>(bibd_transpose_from_difference_set(kFano));
    const auto e = encode_baseline(a, 2);
    const auto& p = std::get<BibdParams>(a->params);
    double worst = 0.0;
    int sets = 0;
    for (int s = 0; s <= 2; ++s) {
        const double expect = 2.0 * 7 - 9.0 * (7 - s) / (3.0 + (7 - s - 1) * 1.0);
        if (std::abs(expect - baseline_bibd_error(p, 2, s).value) > 1e-12) return {false, "closed form mismatch"};
        for_each_subset(7, static_cast<std::size_t>(7 - s), [&](const std::vector<std::size_t>& f) {
            worst = std::max(worst, std::abs(decode(e, NonStragglerSet(7, f)).err - expect));
            ++sets;
        });
    }
    return {worst <= 1e-8, std::to_string(sets) + " sets, max |err - closed form| = " + fmt(worst)};
}

Outcome ac2() {
    SweepConfig cfg;
    const auto ds = builtin_difference_set(91);
    if (!ds) return {false, "no (91,10,1) difference set"};
    cfg.assignment = BibdSpec{*ds};
    cfg.scheme = {Scheme::RandomDiagonal, 0.0, V1Policy::AllOnes, false};
    cfg.m = 2;
    cfg.grid = {0, 5, 10, 20, 30};
    cfg.matrix_draws = 20;
    cfg.set_draws = 100;
    cfg.seed = 2024;
    const auto rows = sweep_error(cfg);
    const BibdParams p{91, 91, 10, 10, 1};
    bool ok = std::abs(bound_bibd(p, 2, 0).value - 16.545454545) < 1e-6 &&
              std::abs(baseline_bibd_error(p, 2, 0).value - 91.0) < 1e-9;
    std::string detail;
    for (const auto& r : rows) {
        const int s = static_cast<int>(r.x);
        const double ub = bound_bibd(p, 2, s).value;
        const double base = baseline_bibd_error(p, 2, s).value;
        ok = ok && r.mean_err <= ub + 3.0 * r.std_err && r.mean_err < base;
        detail += "s=" + std::to_string(s) + ": " + fmt(r.mean_err) + " (eq8 " + fmt(ub) + ", baseline " + fmt(base) + "); ";
    }
    return {ok, detail};
}

Outcome ac3() {
    const auto a = std::make_shared<const AssignmentMatrix>(coset_bipartite(kCoset));
    double worst = 0.0;
    std::size_t min_rank = 54;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto e = encode_random_diagonal(a, 2, {0.1}, seed);
        min_rank = std::min(min_rank, rank_of(e.b));
        worst = std::max(worst, decode(e, NonStragglerSet::full(54)).err);
    }
    const bool control = !coset_is_invertible_base({4, 2, 2, {0, 1}});
    return {min_rank == 54 && worst < 1e-8 && control,
            "min rank " + std::to_string(min_rank) + ", max err " + fmt(worst) +
                ", k=4 {0,1} singular: " + (control ? "yes" : "no")};
}

Outcome ac4() {
    const auto a = std::make_shared<const AssignmentMatrix>(biregular_random(40, 20, 3, 6, 1));
    std::string detail;
    bool ok = true;
    for (int variant = 0; variant < 2; ++variant) {
        NullspaceOptions opts;
        opts.seed = 17;
        if (variant == 0) {
            opts.v1_policy = V1Policy::AllOnes;
            opts.constrain_pm1 = true;
        } else {
            opts.v1_policy = V1Policy::Gaussian;
        }
        const auto e = encode_nullspace_hadamard(a, 2, opts);
        const double gap = nullspace_exactness_gap(e);
        ok = ok && gap < 1e-10;
        int checked = 0, singular = 0, violations = 0;
        double slack = 1e300;
        for (int s : {0, 2, 4, 8}) {
            Rng rng = make_rng(99, {static_cast<std::uint64_t>(variant), static_cast<std::uint64_t>(s)});
            for (int t = 0; t < 1000; ++t) {
                const auto set = sample_straggler_set(StragglerModel::fixed(s), 40, rng);
                double ub = 0.0;
                try {
                    ub = bound_diag_dominant(e, set).value;
                } catch (const Error& err) {
                    if (err.kind() != ErrorKind::Singular) throw;
                    ++singular;
                    continue;
                }
                const double err = decode(e, set).err;
                ++checked;
                slack = std::min(slack, ub - err);
                if (err > ub + 1e-9) ++violations;
            }
        }
        ok = ok && violations == 0 && checked > 0;
        detail += std::string(variant == 0 ? "v1=ones/pm1" : "v1=gaussian") + ": gap " + fmt(gap) + ", " +
                  std::to_string(checked) + " sets checked, " + std::to_string(singular) + " singular, " +
                  std::to_string(violations) + " violations, min slack " + fmt(slack) + "; ";
    }
    return {ok, detail};
}

Outcome ac5() {
    bool ok = lower_bound(13, 13, 4, 2, 5).value == 2.0 && lower_bound(13, 13, 4, 2, 3).value == 1.0 &&
              lower_bound(13, 13, 4, 2, 5).input("u") == 2.0 && lower_bound(13, 13, 4, 2, 3).input("u") == 1.0;
    std::string detail = std::string("example arithmetic ") + (ok ? "ok" : "wrong") + "; ";

    struct Case {
        const char* name;
        std::shared_ptr<const AssignmentMatrix> a;
        double epsilon;
    };
    const Case cases[] = {
        {"fano", std::make_shared<const AssignmentMatrix>(bibd_transpose_from_difference_set(kFano)), 0.0},
        {"paley13", std::make_shared<const AssignmentMatrix>(srg_paley(13)), 0.0},
        {"coset27", std::make_shared<const AssignmentMatrix>(coset_bipartite(kCoset)), 0.1},
    };
    for (const auto& c : cases) {
        const auto e = encode_random_diagonal(c.a, 2, {c.epsilon}, 5);
        const int n = static_cast<int>(c.a->n());
        int bad = 0;
        for (int s = 0; s <= n; ++s) {
            const double lb = lower_bound(n, static_cast<int>(c.a->k()), c.a->delta, 2, s).value;
            if (worst_adversarial(e, s).err < lb - 1e-8) ++bad;
        }
        ok = ok && bad == 0;
        detail += std::string(c.name) + " s=0.." + std::to_string(n) + ": " + std::to_string(bad) + " below bound; ";
    }
    return {ok, detail};
}

Outcome ac6() {
    bool ok = true;
    std::string detail;
    const SchemeSpec rd{Scheme::RandomDiagonal, 0.0, V1Policy::AllOnes, false};
    const std::pair<const char*, std::shared_ptr<const AssignmentMatrix>> cases[] = {
        {"fano", std::make_shared<const AssignmentMatrix>(bibd_transpose_from_difference_set(kFano))},
        {"paley13", std::make_shared<const AssignmentMatrix>(srg_paley(13))},
    };
    for (const auto& [name, a] : cases) {
        const auto est = estimate_unbiasedness(a, rd, 2, 0.25, 10000, 6);
        const bool pass = est.rel_residual <= 0.05 && std::abs(est.beta_hat) > 10.0 * est.beta_se;
        ok = ok && pass;
        detail += std::string(name) + ": beta " + fmt(est.beta_hat) + " (se " + fmt(est.beta_se) + "), rel residual " +
                  fmt(est.rel_residual) + "; ";
    }
    return {ok, detail};
}

double mean_final(const std::vector<Trajectory>& runs, const std::string& scheme) {
    double sum = 0.0;
    int count = 0;
    for (const auto& t : runs)
        if (t.scheme == scheme) {
            sum += t.loss.back();
            ++count;
        }
    return count ? sum / count : NAN;
}

Outcome ac7() {
    bool ok = true;
    std::string detail;
    const std::pair<const char*, std::pair<AssignmentSpec, double>> cases[] = {
        {"fano", {BibdSpec{kFano}, 0.0}},
        {"coset27", {kCoset, 0.1}},
    };
    for (const auto& [name, setup] : cases) {
        TrainConfig cfg;
        cfg.assignment = setup.first;
        cfg.q = 0.25;
        cfg.m = 2;
        cfg.repetitions = 20;
        cfg.iterations = 200;
        cfg.seed = 7;
        cfg.schemes = {{"random_diagonal", TrainMode::Coded, {Scheme::RandomDiagonal, setup.second, V1Policy::AllOnes, false}},
                       {"baseline", TrainMode::Coded, {Scheme::Baseline, 0.0, V1Policy::AllOnes, false}}};
        const auto runs = simulate_training(cfg);
        const double rd = mean_final(runs, "random_diagonal");
        const double base = mean_final(runs, "baseline");
        ok = ok && rd <= base;
        detail += std::string(name) + ": random_diagonal " + fmt(rd) + " vs baseline " + fmt(base) + "; ";
    }

    TrainConfig exact;
    exact.assignment = kCoset;
    exact.q = 0.0;
    exact.repetitions = 20;
    exact.iterations = 200;
    exact.seed = 7;
    exact.schemes = {{"exact", TrainMode::Exact, {}},
                     {"coded", TrainMode::Coded, {Scheme::RandomDiagonal, 0.1, V1Policy::AllOnes, false}}};
    const auto runs = simulate_training(exact);
    const std::size_t reps = static_cast<std::size_t>(exact.repetitions);
    double worst = 0.0;
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t t = 0; t < runs[r].loss.size(); ++t)
            worst = std::max(worst, std::abs(runs[r].loss[t] - runs[reps + r].loss[t]));
    ok = ok && worst <= 1e-6;
    detail += "q=0 coset vs exact max gap " + fmt(worst);
    return {ok, detail};
}

Outcome ac8() {
    Rng rng = make_rng(8, {});
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t k = 1 + rng() % 10, m = 1 + rng() % 3, n = 1 + rng() % 12;
        Matrix b(m * k, n);
        for (auto& v : b.data()) v = g(rng);
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < n; ++j)
            if (rng() % 2) cols.push_back(j);
        if (cols.empty()) cols.push_back(0);
        const Matrix bc = b.select_columns(cols);
        Matrix r(cols.size(), m);
        for (auto& v : r.data()) v = g(rng);
        const double direct = frobenius_sq(matmul(bc, r) - build_target(k, m).f);
        const double grouped = row_group_error(bc, r, k, m);
        worst = std::max(worst, std::abs(direct - grouped) / std::max(1.0, direct));
    }
    return {worst <= 1e-9, "max relative gap " + fmt(worst)};
}

// Composite Simpson on [lo, hi].
double simpson(const std::function<double(double)>& f, double lo, double hi, int intervals) {
    const double h = (hi - lo) / intervals;
    double s = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

Outcome ac9() {
    bool ok = compute_c(0.0) == 1.0;
    double worst = 0.0, prev = -1.0;
    bool increasing = true;
    for (double eps : {0.0, 0.1, 0.3, 0.5, 0.9}) {
        double numeric = 1.0;
        if (eps > 0.0) {
            // The law is symmetric, so both moments only need the positive half.
            const double width = 2.0 * eps;
            const double ex2 = simpson([](double x) { return x * x; }, 1 - eps, 1 + eps, 200000) / width;
            const double einv = simpson([](double x) { return 1.0 / (x * x); }, 1 - eps, 1 + eps, 200000) / width;
            numeric = ex2 * einv;
        }
        const double c = compute_c(eps);
        worst = std::max(worst, std::abs(c - numeric));
        increasing = increasing && c > prev;
        prev = c;
    }
    ok = ok && worst <= 1e-6 && increasing;
    return {ok, "max |analytic - quadrature| " + fmt(worst) + (increasing ? ", increasing" : ", NOT increasing")};
}

}  // namespace

int main() {
    run("AC1", ac1);
    run("AC2", ac2);
    run("AC3", ac3);
    run("AC4", ac4);
    run("AC5", ac5);
    run("AC6", ac6);
    run("AC7", ac7);
    run("AC8", ac8);
    run("AC9", ac9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
