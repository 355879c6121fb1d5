#include "agc/encoders.hpp"

#include "agc/error.hpp"
#include "agc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace agc {
namespace {

constexpr std::uint64_t kDiagStream = 0x64696167ULL;
constexpr std::uint64_t kNullStream = 0x6e756c6cULL;
constexpr double kRestrictionFloor = 1e-8;
constexpr int kMaxRedraws = 100;
constexpr double kExactnessTol = 1e-10;

std::vector<std::vector<std::size_t>> row_supports(const Matrix& a) {
    std::vector<std::vector<std::size_t>> h(a.rows());
    for (std::size_t u = 0; u < a.rows(); ++u)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(u, j) != 0.0) h[u].push_back(j);
    return h;
}

double restricted_norm_sq(const std::vector<double>& v, const std::vector<std::size_t>& h) {
    double s = 0.0;
    for (auto j : h) s += v[j] * v[j];
    return s;
}

// Index of the first row whose restriction of v is numerically zero, or -1.
long weak_restriction(const std::vector<double>& v,
                      const std::vector<std::vector<std::size_t>>& supports) {
    for (std::size_t u = 0; u < supports.size(); ++u)
        if (std::sqrt(restricted_norm_sq(v, supports[u])) < kRestrictionFloor) return static_cast<long>(u);
    return -1;
}

// Row u is v(H_u)^T / ||v(H_u)||^2 on its support.
Matrix hadamard_block(const std::vector<double>& v, const std::vector<std::vector<std::size_t>>& supports,
                      std::size_t n) {
    Matrix blk(supports.size(), n);
    for (std::size_t u = 0; u < supports.size(); ++u) {
        const double nrm = restricted_norm_sq(v, supports[u]);
        for (auto j : supports[u]) blk(u, j) = v[j] / nrm;
    }
    return blk;
}

// Randomized local search for v in {-1, +1}^n with every row of the support
// pattern summing to zero, i.e. A_1 v = 0 when v_1 is the all-ones vector.
std::optional<std::vector<double>> search_pm1(const std::vector<std::vector<std::size_t>>& supports,
                                              std::size_t n, int budget, Rng& rng) {
    for (const auto& h : supports)
        if (h.size() % 2 != 0) return std::nullopt;

    std::vector<std::vector<std::size_t>> rows_of(n);
    for (std::size_t u = 0; u < supports.size(); ++u)
        for (auto j : supports[u]) rows_of[j].push_back(u);

    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution noise(0.2);
    const int restart_every = static_cast<int>(20 * n);
    std::vector<int> v(n);
    std::vector<long> sums(supports.size());
    int flips = 0;
    while (flips < budget) {
        for (auto& x : v) x = coin(rng) ? 1 : -1;
        for (std::size_t u = 0; u < supports.size(); ++u) {
            sums[u] = 0;
            for (auto j : supports[u]) sums[u] += v[j];
        }
        for (int local = 0; local < restart_every && flips < budget; ++local, ++flips) {
            std::vector<std::size_t> bad;
            for (std::size_t u = 0; u < sums.size(); ++u)
                if (sums[u] != 0) bad.push_back(u);
            if (bad.empty()) return std::vector<double>(v.begin(), v.end());
            const std::size_t u =
                bad[std::uniform_int_distribution<std::size_t>(0, bad.size() - 1)(rng)];
            std::vector<std::size_t> cand;
            for (auto j : supports[u])
                if ((sums[u] > 0) == (v[j] > 0)) cand.push_back(j);
            std::size_t pick = cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng)];
            if (!noise(rng)) {
                long best = 0;
                bool first = true;
                for (auto j : cand) {
                    long delta = 0;
                    for (auto r : rows_of[j]) delta += std::labs(sums[r] - 2 * v[j]) - std::labs(sums[r]);
                    if (first || delta < best) {
                        best = delta;
                        pick = j;
                        first = false;
                    }
                }
            }
            for (auto r : rows_of[pick]) sums[r] -= 2 * v[pick];
            v[pick] = -v[pick];
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::RandomDiagonal: return "random_diagonal";
        case Scheme::NullspaceHadamard: return "nullspace_hadamard";
        case Scheme::Baseline: return "baseline";
    }
    return "unknown";
}

std::string_view to_string(V1Policy p) noexcept {
    return p == V1Policy::AllOnes ? "all_ones" : "gaussian";
}

void DiagonalLaw::validate() const {
    require(epsilon >= 0.0 && epsilon < 1.0, ErrorKind::InvalidArgument,
            "epsilon must lie in [0, 1), got " + std::to_string(epsilon));
}

std::vector<double> sample_diagonal(std::size_t n, const DiagonalLaw& law, Rng& rng) {
    law.validate();
    std::bernoulli_distribution sign(0.5);
    std::uniform_real_distribution<double> mag(1.0 - law.epsilon, 1.0 + law.epsilon);
    std::vector<double> d(n);
    for (auto& x : d) {
        const double s = sign(rng) ? 1.0 : -1.0;
        x = law.epsilon == 0.0 ? s : s * mag(rng);
    }
    return d;
}

EncodingMatrix encode_random_diagonal(std::shared_ptr<const AssignmentMatrix> a, int m,
                                      const DiagonalLaw& law, std::uint64_t seed) {
    require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
    law.validate();
    const std::size_t k = a->k();
    const std::size_t n = a->n();
    Rng rng = make_rng(seed, {kDiagStream});
    DiagonalDraws draws{{}, law.epsilon};
    Matrix b(static_cast<std::size_t>(m) * k, n);
    for (int i = 0; i < m; ++i) {
        draws.d.push_back(sample_diagonal(n, law, rng));
        const auto& d = draws.d.back();
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t j = 0; j < n; ++j) b(static_cast<std::size_t>(i) * k + r, j) = a->mat(r, j) * d[j];
    }
    return EncodingMatrix{std::move(b), m, std::move(a), Scheme::RandomDiagonal, std::move(draws), seed};
}

EncodingMatrix encode_baseline(std::shared_ptr<const AssignmentMatrix> a, int m) {
    require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
    Matrix b = a->mat;
    for (int i = 1; i < m; ++i) b = vstack(b, a->mat);
    return EncodingMatrix{std::move(b), m, std::move(a), Scheme::Baseline, std::monostate{}, 0};
}

EncodingMatrix encode_nullspace_hadamard(std::shared_ptr<const AssignmentMatrix> a, int m,
                                         const NullspaceOptions& opts) {
    require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
    const std::size_t k = a->k();
    const std::size_t n = a->n();
    require(n == static_cast<std::size_t>(m) * k, ErrorKind::InvalidArgument,
            "null-space construction needs n = m*k, got n = " + std::to_string(n) +
                ", m*k = " + std::to_string(static_cast<std::size_t>(m) * k));
    const auto supports = row_supports(a->mat);
    for (std::size_t u = 0; u < k; ++u)
        require(!supports[u].empty(), ErrorKind::InvalidArgument,
                "assignment row " + std::to_string(u) + " has empty support");

    Rng rng = make_rng(opts.seed, {kNullStream});
    std::normal_distribution<double> gauss(0.0, 1.0);
    NullspaceVectors rec;
    rec.policy = opts.v1_policy;
    rec.pm1_requested = opts.constrain_pm1;

    std::vector<double> v1(n, 1.0);
    if (opts.v1_policy == V1Policy::Gaussian) {
        int tries = 0;
        do {
            for (auto& x : v1) x = gauss(rng);
        } while (weak_restriction(v1, supports) >= 0 && ++tries < kMaxRedraws);
    }
    if (const long u = weak_restriction(v1, supports); u >= 0)
        fail(ErrorKind::Construction, "v_1 restricted to row " + std::to_string(u) + " is numerically zero");
    rec.v.push_back(v1);
    Matrix b = hadamard_block(v1, supports, n);

    for (int j = 2; j <= m; ++j) {
        std::optional<std::vector<double>> vj;
        if (opts.constrain_pm1 && m == 2 && opts.v1_policy == V1Policy::AllOnes) {
            vj = search_pm1(supports, n, opts.pm1_budget, rng);
            if (vj) {
                const auto r = matvec(b, *vj);
                const double worst = r.empty() ? 0.0 : std::abs(*std::max_element(
                    r.begin(), r.end(), [](double x, double y) { return std::abs(x) < std::abs(y); }));
                if (worst > 1e-9) vj.reset();
            }
            if (!vj) rec.pm1_fallback = true;
        }
        if (!vj) {
            const Matrix basis = null_space_basis(b, opts.tol);
            require(basis.cols() > 0, ErrorKind::Construction,
                    "null space of the stacked blocks is trivial at j = " + std::to_string(j));
            long weak = -1;
            for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
                std::vector<double> g(basis.cols());
                for (auto& x : g) x = gauss(rng);
                const double gn = std::sqrt(kernels::sum_squares(g));
                for (auto& x : g) x /= gn;
                auto cand = matvec(basis, g);
                weak = weak_restriction(cand, supports);
                if (weak < 0) {
                    vj = std::move(cand);
                    break;
                }
            }
            if (!vj)
                fail(ErrorKind::Construction, "v_" + std::to_string(j) + " restricted to row " +
                                                  std::to_string(weak) + " stayed numerically zero after " +
                                                  std::to_string(kMaxRedraws) + " draws");
        }
        b = vstack(b, hadamard_block(*vj, supports, n));
        rec.v.push_back(std::move(*vj));
    }

    EncodingMatrix e{std::move(b), m, std::move(a), Scheme::NullspaceHadamard, std::move(rec), opts.seed};
    const double gap = nullspace_exactness_gap(e);
    if (!(gap <= kExactnessTol))
        fail(ErrorKind::Construction, "B v_i = f_i violated by " + std::to_string(gap));
    return e;
}

bool verify_support(const EncodingMatrix& e) {
    const auto& a = e.parent->mat;
    const std::size_t k = a.rows();
    if (e.b.rows() != static_cast<std::size_t>(e.m) * k || e.b.cols() != a.cols()) return false;
    for (int i = 0; i < e.m; ++i)
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t j = 0; j < a.cols(); ++j)
                if ((e.b(static_cast<std::size_t>(i) * k + r, j) != 0.0) != (a(r, j) != 0.0)) return false;
    return true;
}

double nullspace_exactness_gap(const EncodingMatrix& e) {
    const auto* rec = std::get_if<NullspaceVectors>(&e.randomness);
    require(rec != nullptr, ErrorKind::InvalidArgument,
            "exactness check applies only to the null-space construction");
    const std::size_t k = e.k();
    double gap = 0.0;
    for (std::size_t i = 0; i < rec->v.size(); ++i) {
        const auto bv = matvec(e.b, rec->v[i]);
        for (std::size_t r = 0; r < bv.size(); ++r) {
            const double target = (r / k == i) ? 1.0 : 0.0;
            gap = std::max(gap, std::abs(bv[r] - target));
        }
    }
    return gap;
}

}  // namespace agc
