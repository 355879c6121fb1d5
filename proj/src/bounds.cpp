#include "agc/bounds.hpp"

#include "agc/error.hpp"
#include "agc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace agc {
namespace {

constexpr std::uint64_t kLemma1Stream = 0x6c656d31ULL;

void check_s(int s, int n) {
    require(s >= 0 && s <= n, ErrorKind::InvalidArgument,
            "straggler count s = " + std::to_string(s) + " outside [0, " + std::to_string(n) + "]");
}

BoundReport finish(BoundReport r) {
    require(std::isfinite(r.value), ErrorKind::NonFinite,
            std::string("bound ") + std::string(to_string(r.kind)) + " is not finite");
    return r;
}

std::vector<double> column_sums(const Matrix& a) {
    std::vector<double> s(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s[j] += a(i, j);
    return s;
}

}  // namespace

std::string_view to_string(BoundKind k) noexcept {
    switch (k) {
        case BoundKind::Lemma1: return "lemma1";
        case BoundKind::BibdUpper: return "bibd_upper";
        case BoundKind::SrgUpper: return "srg_upper";
        case BoundKind::CosetUpper: return "coset_upper";
        case BoundKind::DiagDomUpper: return "diag_dominant_upper";
        case BoundKind::Lower: return "lower";
        case BoundKind::BaselineBibd: return "baseline_bibd";
    }
    return "unknown";
}

double BoundReport::input(std::string_view name) const {
    for (const auto& [key, v] : inputs)
        if (key == name) return v;
    fail(ErrorKind::InvalidArgument, "bound report has no input named " + std::string(name));
}

double compute_c(double epsilon) {
    require(epsilon >= 0.0 && epsilon < 1.0, ErrorKind::InvalidArgument,
            "c(eps) needs eps in [0, 1), got " + std::to_string(epsilon));
    const double e2 = epsilon * epsilon;
    return (1.0 + e2 / 3.0) / (1.0 - e2);
}

BoundReport bound_lemma1(const AssignmentMatrix& a, const NonStragglerSet& set, int m, double c) {
    require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
    require(c >= 1.0, ErrorKind::InvalidArgument, "c must be >= 1");
    require(set.n() == a.n(), ErrorKind::DimensionMismatch, "non-straggler set does not match A");
    const double mk = static_cast<double>(m) * static_cast<double>(a.k());
    BoundReport r{BoundKind::Lemma1, mk,
                  {{"m", m}, {"k", static_cast<double>(a.k())}, {"c", c},
                   {"s", static_cast<double>(set.stragglers())}}};
    if (set.size() == 0) return r;

    const Matrix af = a.mat.select_columns(set.members());
    Matrix kmat = gram(af);
    for (std::size_t j = 0; j < kmat.rows(); ++j) kmat(j, j) *= 1.0 + c * (m - 1);
    const auto rhs = column_sums(af);
    std::vector<double> x;
    try {
        x = solve_spd(kmat, rhs);
    } catch (const Error& e) {
        fail(ErrorKind::Singular, std::string("Lemma 1 matrix K is singular: ") + e.what());
    }
    r.value = mk - m * std::inner_product(rhs.begin(), rhs.end(), x.begin(), 0.0);
    return finish(std::move(r));
}

BoundReport bound_lemma1_max(const AssignmentMatrix& a, int m, double c, int s, int draws,
                             std::uint64_t seed) {
    const int n = static_cast<int>(a.n());
    check_s(s, n);
    require(draws >= 1, ErrorKind::InvalidArgument, "draws must be >= 1");
    BoundReport best{BoundKind::Lemma1, -1.0, {}};
    std::vector<std::size_t> perm(a.n());
    for (int t = 0; t < draws; ++t) {
        Rng rng = make_rng(seed, {kLemma1Stream, static_cast<std::uint64_t>(t)});
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        NonStragglerSet set(a.n(), std::vector<std::size_t>(perm.begin() + s, perm.end()));
        auto r = bound_lemma1(a, set, m, c);
        if (r.value > best.value) best = std::move(r);
        if (s == 0) break;  // only one set
    }
    best.inputs.emplace_back("draws", draws);
    return best;
}

BoundReport bound_bibd(const BibdParams& p, int m, int s) {
    check_s(s, p.n);
    const double ns = p.n - s;
    const double value = static_cast<double>(m) * p.k -
                         m * static_cast<double>(p.delta) * p.delta * ns / (m * p.delta + (ns - 1) * p.lambda);
    return finish({BoundKind::BibdUpper, value,
                   {{"n", p.n}, {"k", p.k}, {"delta", p.delta}, {"lambda", p.lambda}, {"m", m}, {"s", s}}});
}

BoundReport bound_srg(const SrgParams& p, int m, int s) {
    check_s(s, p.n);
    require(p.delta > 0 && p.delta != p.mu, ErrorKind::InvalidArgument, "SRG bound needs 0 < delta != mu");
    const double lm = p.lambda - p.mu;
    const double theta = p.lambda >= p.mu ? p.delta : (lm - std::sqrt(lm * lm + 4.0 * (p.delta - p.mu))) / 2.0;
    const double ns = p.n - s;
    const double denom = (m * p.delta - p.mu) + p.mu * ns + lm * theta;
    const double value = static_cast<double>(m) * p.n - m * static_cast<double>(p.delta) * p.delta * ns / denom;
    return finish({BoundKind::SrgUpper, value,
                   {{"n", p.n}, {"delta", p.delta}, {"lambda", p.lambda}, {"mu", p.mu}, {"m", m}, {"s", s},
                    {"theta", theta}}});
}

BoundReport bound_coset(const CosetParams& p, int s, double c) {
    const int mk = p.m * p.k;
    check_s(s, mk);
    const double d = p.delta;
    const double value = mk - p.m * d * d * (mk - s) / (p.m * d * d + c * (p.m - 1) * d);
    return finish({BoundKind::CosetUpper, value,
                   {{"k", p.k}, {"m", p.m}, {"delta", p.delta}, {"s", s}, {"c", c}}});
}

BoundReport bound_diag_dominant(const EncodingMatrix& e, const NonStragglerSet& set, const Tolerance& tol) {
    require(set.n() == e.n(), ErrorKind::DimensionMismatch, "non-straggler set does not match B");
    const std::size_t k = e.k();
    const double mk = static_cast<double>(e.b.rows());
    BoundReport r{BoundKind::DiagDomUpper, mk,
                  {{"m", e.m}, {"k", static_cast<double>(k)}, {"s", static_cast<double>(set.stragglers())}}};
    if (set.size() == 0) return r;

    const Matrix bf = e.b.select_columns(set.members());
    if (rank_of(bf, tol) < set.size()) {
        std::string who;
        for (auto j : set.members()) who += (who.empty() ? "" : ",") + std::to_string(j);
        fail(ErrorKind::Singular, "Sigma_F is singular for F = {" + who + "}");
    }
    const Matrix sigma = gram(bf);
    std::vector<double> tilde(sigma.rows());
    for (std::size_t u = 0; u < sigma.rows(); ++u) {
        double acc = 0.0;
        for (std::size_t j = 0; j < sigma.cols(); ++j) acc += std::abs(sigma(u, j));
        tilde[u] = acc;
    }
    for (int i = 0; i < e.m; ++i) {
        const auto sums = column_sums(bf.row_block(static_cast<std::size_t>(i) * k, k));
        for (std::size_t u = 0; u < sums.size(); ++u) r.value -= sums[u] * sums[u] / tilde[u];
    }
    return finish(std::move(r));
}

BoundReport lower_bound(int n, int k, int delta, int m, int s) {
    check_s(s, n);
    require(n >= 1 && k >= 1 && delta >= 1 && m >= 1, ErrorKind::InvalidArgument,
            "lower bound needs positive n, k, delta, m");
    std::int64_t best = 0;
    int arg = 1;
    for (int u = 1; u <= m; ++u) {
        const std::int64_t q = static_cast<std::int64_t>(k) * (s + m - u) / (static_cast<std::int64_t>(n) * delta);
        if (q * u > best) {
            best = q * u;
            arg = u;
        }
    }
    return {BoundKind::Lower, static_cast<double>(best),
            {{"n", n}, {"k", k}, {"delta", delta}, {"m", m}, {"s", s}, {"u", arg}}};
}

NonStragglerSet adversarial_straggler_set(const AssignmentMatrix& a, int m, int s, int u) {
    const std::size_t n = a.n();
    const std::size_t k = a.k();
    check_s(s, static_cast<int>(n));
    require(u >= 1 && u <= m, ErrorKind::InvalidArgument, "u must lie in [1, m]");
    require(a.delta >= 1, ErrorKind::InvalidArgument, "assignment has zero computation load");

    std::vector<std::size_t> degree(k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a.mat(i, j) != 0.0) ++degree[i];
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return degree[x] < degree[y]; });

    const std::size_t q = static_cast<std::size_t>(k) * static_cast<std::size_t>(s + m - u) /
                          (n * static_cast<std::size_t>(a.delta));
    std::vector<bool> in_n(n, false);
    for (std::size_t t = 0; t < std::min(q, k); ++t)
        for (std::size_t j = 0; j < n; ++j)
            if (a.mat(order[t], j) != 0.0) in_n[j] = true;

    std::vector<std::size_t> stragglers;
    for (std::size_t j = 0; j < n && stragglers.size() < static_cast<std::size_t>(s); ++j)
        if (in_n[j]) stragglers.push_back(j);
    for (std::size_t j = 0; j < n && stragglers.size() < static_cast<std::size_t>(s); ++j)
        if (!in_n[j]) stragglers.push_back(j);
    return NonStragglerSet::without(n, stragglers);
}

AdversarialOutcome worst_adversarial(const EncodingMatrix& e, int s, const Tolerance& tol) {
    AdversarialOutcome best{1, {}, -1.0};
    for (int u = 1; u <= e.m; ++u) {
        auto set = adversarial_straggler_set(*e.parent, e.m, s, u);
        const double err = decode_error(e.b, static_cast<std::size_t>(e.m), set, tol);
        if (err > best.err) best = {u, std::move(set), err};
    }
    return best;
}

BoundReport baseline_bibd_error(const BibdParams& p, int m, int s) {
    check_s(s, p.n);
    const double ns = p.n - s;
    const double value = static_cast<double>(m) * p.k -
                         static_cast<double>(p.delta) * p.delta * ns / (p.delta + (ns - 1) * p.lambda);
    return finish({BoundKind::BaselineBibd, value,
                   {{"n", p.n}, {"k", p.k}, {"delta", p.delta}, {"lambda", p.lambda}, {"m", m}, {"s", s}}});
}

}  // namespace agc
