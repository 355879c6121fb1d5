#include "agc/experiments.hpp"

#include "agc/error.hpp"
#include "agc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace agc {
namespace {

constexpr std::uint64_t kMatrixStream = 0x6d617472ULL;
constexpr std::uint64_t kSetStream = 0x73657473ULL;
constexpr std::uint64_t kBoundStream = 0x626e6473ULL;
constexpr std::uint64_t kUnbiasedStream = 0x756e6269ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxEnumeration = 2'000'000;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// All size-s subsets of [n] in lexicographic order, as straggler lists.
std::vector<std::vector<std::size_t>> enumerate_subsets(std::size_t n, std::size_t s) {
    double count = 1.0;
    for (std::size_t i = 0; i < s; ++i) count = count * static_cast<double>(n - i) / static_cast<double>(i + 1);
    require(count <= static_cast<double>(kMaxEnumeration), ErrorKind::InvalidArgument,
            "exhaustive enumeration of C(" + std::to_string(n) + ", " + std::to_string(s) + ") sets is too large");
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(s);
    std::iota(cur.begin(), cur.end(), std::size_t{0});
    while (true) {
        out.push_back(cur);
        if (s == 0) break;
        std::size_t i = s;
        while (i > 0 && cur[i - 1] == n - s + i - 1) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < s; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

int grid_s(double x, std::size_t n) {
    const double r = std::round(x);
    require(r == x && r >= 0.0 && r <= static_cast<double>(n), ErrorKind::InvalidArgument,
            "straggler count " + std::to_string(x) + " is not an integer in [0, " + std::to_string(n) + "]");
    return static_cast<int>(r);
}

struct ItemResult {
    std::vector<double> errs;
    double diag_dom_max = -1.0;
};

}  // namespace

NonStragglerSet sample_straggler_set(const StragglerModel& model, std::size_t n, Rng& rng) {
    if (model.kind == StragglerModel::Kind::FixedCount) {
        require(model.s >= 0 && static_cast<std::size_t>(model.s) <= n, ErrorKind::InvalidArgument,
                "cannot pick " + std::to_string(model.s) + " stragglers out of " + std::to_string(n));
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        // Partial Fisher-Yates: the first s entries are the stragglers.
        for (std::size_t i = 0; i < static_cast<std::size_t>(model.s); ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(perm[i], perm[pick(rng)]);
        }
        return NonStragglerSet(n, std::vector<std::size_t>(perm.begin() + model.s, perm.end()));
    }
    require(model.q >= 0.0 && model.q < 1.0, ErrorKind::InvalidArgument,
            "straggling probability must lie in [0, 1), got " + std::to_string(model.q));
    std::bernoulli_distribution keep(1.0 - model.q);
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j)
        if (keep(rng)) members.push_back(j);
    return NonStragglerSet(n, std::move(members));
}

std::shared_ptr<const AssignmentMatrix> build_assignment(const AssignmentSpec& spec) {
    return std::visit(
        overloaded{
            [](const BibdSpec& b) {
                return std::make_shared<const AssignmentMatrix>(bibd_transpose_from_difference_set(b.difference_set));
            },
            [](const PaleySpec& p) { return std::make_shared<const AssignmentMatrix>(srg_paley(p.q)); },
            [](const CosetParams& p) { return std::make_shared<const AssignmentMatrix>(coset_bipartite(p)); },
            [](const BiRegularParams& p) {
                return std::make_shared<const AssignmentMatrix>(
                    biregular_random(p.n, p.k, p.delta, p.gamma, p.seed));
            },
        },
        spec);
}

std::string family_name(const AssignmentSpec& spec) {
    static constexpr const char* names[] = {"bibd", "srg", "coset", "biregular"};
    return names[spec.index()];
}

EncodingMatrix build_encoding(const SchemeSpec& spec, std::shared_ptr<const AssignmentMatrix> a, int m,
                              std::uint64_t seed) {
    switch (spec.scheme) {
        case Scheme::RandomDiagonal: return encode_random_diagonal(std::move(a), m, {spec.epsilon}, seed);
        case Scheme::Baseline: return encode_baseline(std::move(a), m);
        case Scheme::NullspaceHadamard: {
            NullspaceOptions opts;
            opts.v1_policy = spec.v1_policy;
            opts.constrain_pm1 = spec.constrain_pm1;
            opts.seed = seed;
            return encode_nullspace_hadamard(std::move(a), m, opts);
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown scheme");
}

std::string_view to_string(XKind x) noexcept { return x == XKind::Stragglers ? "s" : "q"; }

double scheme_upper_bound(const AssignmentMatrix& a, const SchemeSpec& scheme, int m, int s, int bound_draws,
                          std::uint64_t seed) {
    if (scheme.scheme == Scheme::NullspaceHadamard) return kNaN;
    if (scheme.scheme == Scheme::Baseline) {
        if (const auto* p = std::get_if<BibdParams>(&a.params)) return baseline_bibd_error(*p, m, s).value;
        return kNaN;
    }
    if (scheme.epsilon == 0.0) {
        if (const auto* p = std::get_if<BibdParams>(&a.params)) return bound_bibd(*p, m, s).value;
        if (const auto* p = std::get_if<SrgParams>(&a.params)) return bound_srg(*p, m, s).value;
    }
    const double c = compute_c(scheme.epsilon);
    if (const auto* p = std::get_if<CosetParams>(&a.params); p && p->m == m) return bound_coset(*p, s, c).value;
    try {
        return bound_lemma1_max(a, m, c, s, bound_draws, derive_seed(seed, {kBoundStream})).value;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Singular) return kNaN;
        throw;
    }
}

std::vector<SweepRow> sweep_error(const SweepConfig& cfg) {
    require(cfg.m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
    require(cfg.matrix_draws >= 1 && cfg.set_draws >= 1, ErrorKind::InvalidArgument,
            "matrix_draws and set_draws must be >= 1");
    require(!cfg.grid.empty(), ErrorKind::InvalidArgument, "sweep grid is empty");
    require(!(cfg.exhaustive && cfg.x_kind == XKind::Probability), ErrorKind::InvalidArgument,
            "exhaustive enumeration needs a straggler-count grid");
    const auto a = build_assignment(cfg.assignment);
    const std::size_t n = a->n();
    for (double x : cfg.grid) {
        if (cfg.x_kind == XKind::Stragglers) grid_s(x, n);
        else require(x >= 0.0 && x < 1.0, ErrorKind::InvalidArgument, "q must lie in [0, 1)");
    }

    const std::size_t draws = static_cast<std::size_t>(cfg.matrix_draws);
    std::vector<ItemResult> items(cfg.grid.size() * draws);
    parallel_for(
        items.size(),
        [&](std::size_t idx) {
            const std::size_t g = idx / draws;
            const std::size_t t = idx % draws;
            const auto enc = build_encoding(cfg.scheme, a, cfg.m, derive_seed(cfg.seed, {kMatrixStream, t}));
            const auto mm = static_cast<std::size_t>(cfg.m);
            auto& out = items[idx];
            auto evaluate = [&](const NonStragglerSet& set) {
                out.errs.push_back(decode_error(enc.b, mm, set));
                if (cfg.scheme.scheme == Scheme::NullspaceHadamard) {
                    try {
                        out.diag_dom_max = std::max(out.diag_dom_max, bound_diag_dominant(enc, set).value);
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::Singular) throw;
                    }
                }
            };
            if (cfg.exhaustive) {
                for (const auto& st : enumerate_subsets(n, static_cast<std::size_t>(grid_s(cfg.grid[g], n))))
                    evaluate(NonStragglerSet::without(n, st));
                return;
            }
            const StragglerModel model = cfg.x_kind == XKind::Stragglers
                                             ? StragglerModel::fixed(grid_s(cfg.grid[g], n))
                                             : StragglerModel::bernoulli(cfg.grid[g]);
            Rng rng = make_rng(cfg.seed, {kSetStream, g, t});
            out.errs.reserve(static_cast<std::size_t>(cfg.set_draws));
            for (int r = 0; r < cfg.set_draws; ++r) evaluate(sample_straggler_set(model, n, rng));
        },
        cfg.threads);

    std::vector<SweepRow> rows;
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
        SweepRow row;
        row.scheme = std::string(to_string(cfg.scheme.scheme));
        row.family = family_name(cfg.assignment);
        row.m = cfg.m;
        row.epsilon = cfg.scheme.epsilon;
        row.x_kind = cfg.x_kind;
        row.x = cfg.grid[g];
        row.seed = cfg.seed;
        double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo, dd = -1.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < draws; ++t) {
            const auto& it = items[g * draws + t];
            for (double e : it.errs) {
                sum += e;
                lo = std::min(lo, e);
                hi = std::max(hi, e);
            }
            count += it.errs.size();
            dd = std::max(dd, it.diag_dom_max);
        }
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (std::size_t t = 0; t < draws; ++t)
            for (double e : items[g * draws + t].errs) ss += (e - mean) * (e - mean);
        row.mean_err = mean;
        row.std_err = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
        row.min_err = lo;
        row.max_err = hi;
        row.samples = count;
        if (cfg.x_kind == XKind::Stragglers) {
            const int s = grid_s(cfg.grid[g], n);
            row.upper_bound = cfg.scheme.scheme == Scheme::NullspaceHadamard
                                  ? (dd >= 0.0 ? dd : kNaN)
                                  : scheme_upper_bound(*a, cfg.scheme, cfg.m, s, cfg.bound_draws, cfg.seed);
            row.lower_bound = lower_bound(static_cast<int>(n), static_cast<int>(a->k()), a->delta, cfg.m, s).value;
        } else {
            row.upper_bound = kNaN;
            row.lower_bound = kNaN;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

UnbiasednessEstimate estimate_unbiasedness(std::shared_ptr<const AssignmentMatrix> a, const SchemeSpec& scheme,
                                           int m, double q, int trials, std::uint64_t seed, const Tolerance& tol,
                                           std::size_t threads) {
    require(trials >= 2, ErrorKind::InvalidArgument, "unbiasedness needs at least 2 trials");
    const std::size_t n = a->n();
    const std::size_t mk = static_cast<std::size_t>(m) * a->k();
    const Matrix f = build_target(a->k(), static_cast<std::size_t>(m)).f;
    const double fnorm2 = frobenius_sq(f);
    const StragglerModel model = StragglerModel::bernoulli(q);

    // Fixed chunking keeps the floating-point reduction order independent of
    // the thread count.
    constexpr std::size_t kChunks = 64;
    const auto total = static_cast<std::size_t>(trials);
    std::vector<Matrix> partial(kChunks, Matrix(mk, static_cast<std::size_t>(m)));
    std::vector<double> beta(total);
    parallel_for(
        kChunks,
        [&](std::size_t c) {
            for (std::size_t t = c; t < total; t += kChunks) {
                Rng rng = make_rng(seed, {kUnbiasedStream, t});
                const auto enc = build_encoding(scheme, a, m, derive_seed(seed, {kMatrixStream, t}));
                const auto set = sample_straggler_set(model, n, rng);
                const auto dec = decode(enc, set, tol);
                const Matrix br = matmul(enc.b, dec.r);
                auto& acc = partial[c];
                double inner = 0.0;
                for (std::size_t i = 0; i < br.size(); ++i) {
                    acc.data()[i] += br.data()[i];
                    inner += br.data()[i] * f.data()[i];
                }
                beta[t] = inner / fnorm2;
            }
        },
        threads);

    Matrix mean(mk, static_cast<std::size_t>(m));
    for (const auto& p : partial) mean = mean + p;
    mean = (1.0 / static_cast<double>(total)) * mean;

    UnbiasednessEstimate out;
    out.trials = total;
    double inner = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) inner += mean.data()[i] * f.data()[i];
    out.beta_hat = inner / fnorm2;
    double ss = 0.0;
    for (double b : beta) ss += (b - out.beta_hat) * (b - out.beta_hat);
    out.beta_se = std::sqrt(ss / static_cast<double>(total - 1) / static_cast<double>(total));
    const double resid = std::sqrt(frobenius_sq(mean - out.beta_hat * f));
    out.rel_residual = resid / (std::abs(out.beta_hat) * std::sqrt(fnorm2));
    out.flagged = !(std::abs(out.beta_hat) > 10.0 * out.beta_se);
    return out;
}

}  // namespace agc
