#include "agc/designs.hpp"

#include "agc/error.hpp"
#include "agc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace agc {
namespace {

using IntMatrix = std::vector<std::vector<long>>;

IntMatrix to_int(const Matrix& m) {
    IntMatrix out(m.rows(), std::vector<long>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = std::lround(m(i, j));
    return out;
}

bool is_binary(const Matrix& m) {
    return std::all_of(m.data().begin(), m.data().end(),
                       [](double v) { return v == 0.0 || v == 1.0; });
}

std::string cell_str(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_sums(const AssignmentMatrix& a, int row_sum, int col_sum, ValidationReport& rep) {
    const auto& m = a.mat;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double v : m.row(i)) s += v;
        if (s != row_sum) {
            rep.flag_cell(i, 0, "row " + std::to_string(i) + " sums to " + std::to_string(s) +
                                    ", expected " + std::to_string(row_sum));
            return;
        }
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j);
        if (s != col_sum) {
            rep.flag_cell(0, j, "column " + std::to_string(j) + " sums to " + std::to_string(s) +
                                    ", expected " + std::to_string(col_sum));
            return;
        }
    }
}

int mod(long x, long v) { return static_cast<int>(((x % v) + v) % v); }

}  // namespace

std::string_view to_string(Family f) noexcept {
    switch (f) {
        case Family::BibdTranspose: return "bibd";
        case Family::SrgAdjacency: return "srg";
        case Family::CosetBipartite: return "coset";
        case Family::BiRegular: return "biregular";
    }
    return "unknown";
}

void ValidationReport::flag(std::string msg) {
    ok = false;
    messages.push_back(std::move(msg));
}

void ValidationReport::flag_cell(std::size_t i, std::size_t j, std::string msg) {
    if (!first_violation) first_violation = Cell{i, j};
    flag(std::move(msg));
}

int difference_set_lambda(const DifferenceSet& ds) {
    require(ds.v >= 2, ErrorKind::InvalidArgument, "difference set modulus must be >= 2");
    std::set<int> elems;
    for (int d : ds.set) {
        require(d >= 0 && d < ds.v, ErrorKind::InvalidArgument,
                "difference set element " + std::to_string(d) + " outside [0, v)");
        require(elems.insert(d).second, ErrorKind::InvalidArgument,
                "difference set element " + std::to_string(d) + " repeated");
    }
    std::vector<int> count(static_cast<std::size_t>(ds.v), 0);
    for (int x : ds.set)
        for (int y : ds.set)
            if (x != y) ++count[static_cast<std::size_t>(mod(x - y, ds.v))];
    const int lambda = count[1];
    for (int r = 1; r < ds.v; ++r)
        if (count[static_cast<std::size_t>(r)] != lambda || lambda == 0)
            fail(ErrorKind::Validation,
                 "not a difference set mod " + std::to_string(ds.v) + ": residue " +
                     std::to_string(r) + " arises " +
                     std::to_string(count[static_cast<std::size_t>(r)]) + " times, residue 1 arises " +
                     std::to_string(lambda) + " times");
    return lambda;
}

AssignmentMatrix bibd_transpose_from_difference_set(const DifferenceSet& ds) {
    const int lambda = difference_set_lambda(ds);
    const int v = ds.v;
    const int size = static_cast<int>(ds.set.size());
    AssignmentMatrix a;
    a.mat = Matrix(static_cast<std::size_t>(v), static_cast<std::size_t>(v));
    for (int i = 0; i < v; ++i)
        for (int d : ds.set) a.mat(static_cast<std::size_t>(i), static_cast<std::size_t>(mod(d + i, v))) = 1.0;
    a.delta = size;
    a.gamma = size;
    a.family = Family::BibdTranspose;
    a.params = BibdParams{v, v, size, size, lambda};
    return a;
}

ValidationReport validate_bibd(const AssignmentMatrix& a, const BibdParams& p) {
    ValidationReport rep;
    const auto& m = a.mat;
    if (m.rows() != static_cast<std::size_t>(p.k) || m.cols() != static_cast<std::size_t>(p.n)) {
        rep.flag("shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                 " does not match (k, n) = (" + std::to_string(p.k) + ", " + std::to_string(p.n) + ")");
        return rep;
    }
    if (!is_binary(m)) {
        rep.flag("matrix is not binary");
        return rep;
    }
    if (p.delta <= p.lambda)
        rep.flag("delta = " + std::to_string(p.delta) + " <= lambda = " + std::to_string(p.lambda) +
                 "; a BIBD requires delta > lambda");
    check_sums(a, p.gamma, p.delta, rep);
    const IntMatrix im = to_int(m);
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j) {
            long g = 0;
            for (int r = 0; r < p.k; ++r) g += im[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
                                                im[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
            const long expect = (i == j ? p.delta - p.lambda : 0) + p.lambda;
            if (g != expect) {
                rep.flag_cell(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                              "(M^T M)" + cell_str(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) + " = " +
                                  std::to_string(g) + ", expected " + std::to_string(expect));
                return rep;
            }
        }
    return rep;
}

bool is_prime(int q) noexcept {
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

std::vector<int> quadratic_residues(int q) {
    std::set<int> r;
    for (long x = 1; x < q; ++x) r.insert(static_cast<int>((x * x) % q));
    return {r.begin(), r.end()};
}

AssignmentMatrix srg_paley(int q) {
    require(is_prime(q), ErrorKind::InvalidArgument,
            "Paley graph order " + std::to_string(q) + " is not prime");
    require(q % 4 == 1, ErrorKind::InvalidArgument,
            "Paley graph order " + std::to_string(q) + " is not 1 mod 4");
    const auto qr = quadratic_residues(q);
    std::vector<bool> is_qr(static_cast<std::size_t>(q), false);
    for (int r : qr) is_qr[static_cast<std::size_t>(r)] = true;
    AssignmentMatrix a;
    a.mat = Matrix(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            if (is_qr[static_cast<std::size_t>(mod(i - j, q))]) a.mat(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 1.0;
    a.delta = (q - 1) / 2;
    a.gamma = a.delta;
    a.family = Family::SrgAdjacency;
    a.params = SrgParams{q, (q - 1) / 2, (q - 5) / 4, (q - 1) / 4};
    return a;
}

ValidationReport validate_srg(const AssignmentMatrix& a, const SrgParams& p) {
    ValidationReport rep;
    const auto& m = a.mat;
    const auto n = static_cast<std::size_t>(p.n);
    if (m.rows() != n || m.cols() != n) {
        rep.flag("adjacency matrix is not " + std::to_string(n) + "x" + std::to_string(n));
        return rep;
    }
    if (!is_binary(m)) {
        rep.flag("matrix is not binary");
        return rep;
    }
    if (p.delta <= 0 || p.delta == p.mu) rep.flag("parameters require 0 < delta != mu");
    if (p.delta >= p.n - 1) rep.flag("graph is complete; an SRG is neither complete nor empty");
    const IntMatrix im = to_int(m);
    for (std::size_t i = 0; i < n; ++i) {
        if (im[i][i] != 0) {
            rep.flag_cell(i, i, "nonzero diagonal at " + cell_str(i, i));
            return rep;
        }
        for (std::size_t j = 0; j < n; ++j)
            if (im[i][j] != im[j][i]) {
                rep.flag_cell(i, j, "asymmetric entry at " + cell_str(i, j));
                return rep;
            }
    }
    check_sums(a, p.delta, p.delta, rep);
    if (!rep.ok) return rep;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            long sq = 0;
            for (std::size_t r = 0; r < n; ++r) sq += im[i][r] * im[r][j];
            const long adj = im[i][j];
            const long eye = i == j ? 1 : 0;
            const long expect = p.delta * eye + p.lambda * adj + p.mu * (1 - eye - adj);
            if (sq != expect) {
                rep.flag_cell(i, j, "(M^2)" + cell_str(i, j) + " = " + std::to_string(sq) +
                                        ", expected " + std::to_string(expect));
                return rep;
            }
        }
    return rep;
}

namespace {

void check_coset_params(const CosetParams& p) {
    require(p.k >= 1 && p.m >= 1, ErrorKind::InvalidArgument, "coset graph needs k, m >= 1");
    require(p.delta >= 1 && static_cast<int>(p.generating_set.size()) == p.delta,
            ErrorKind::InvalidArgument,
            "generating set size " + std::to_string(p.generating_set.size()) +
                " does not equal delta = " + std::to_string(p.delta));
    std::set<int> seen;
    for (int b : p.generating_set) {
        require(b >= 0 && b < p.k, ErrorKind::InvalidArgument,
                "generating set element " + std::to_string(b) + " outside [0, k)");
        require(seen.insert(b).second, ErrorKind::InvalidArgument,
                "generating set element " + std::to_string(b) + " repeated");
    }
}

}  // namespace

AssignmentMatrix coset_bipartite(const CosetParams& p) {
    check_coset_params(p);
    const int n = p.m * p.k;
    // S = union over b in B of the cosets b + H, H = {0, k, ..., (m-1)k}.
    std::vector<int> s;
    for (int b : p.generating_set)
        for (int t = 0; t < p.m; ++t) s.push_back(mod(b + t * p.k, n));
    AssignmentMatrix a;
    a.mat = Matrix(static_cast<std::size_t>(p.k), static_cast<std::size_t>(n));
    for (int i = 0; i < p.k; ++i)
        for (int x : s) a.mat(static_cast<std::size_t>(i), static_cast<std::size_t>(mod(i + x, n))) = 1.0;
    a.delta = p.delta;
    a.gamma = p.m * p.delta;
    a.family = Family::CosetBipartite;
    a.params = p;

    const Matrix base = coset_base_block(p);
    for (int t = 0; t < p.m; ++t)
        for (int i = 0; i < p.k; ++i)
            for (int y = 0; y < p.k; ++y)
                if (a.mat(static_cast<std::size_t>(i), static_cast<std::size_t>(t * p.k + y)) != base(static_cast<std::size_t>(i), static_cast<std::size_t>(y)))
                    fail(ErrorKind::Construction, "coset graph is not of the form [C | ... | C]");
    return a;
}

Matrix coset_base_block(const CosetParams& p) {
    check_coset_params(p);
    Matrix c(static_cast<std::size_t>(p.k), static_cast<std::size_t>(p.k));
    for (int i = 0; i < p.k; ++i)
        for (int b : p.generating_set) c(static_cast<std::size_t>(i), static_cast<std::size_t>(mod(i + b, p.k))) = 1.0;
    return c;
}

bool coset_is_invertible_base(const CosetParams& p, const Tolerance& tol) {
    tol.validate();
    const Matrix c = coset_base_block(p);
    const auto eig = circulant_eigenvalues(c.row(0));
    const double cut = tol.rank_eps * static_cast<double>(p.delta);
    return std::all_of(eig.begin(), eig.end(), [cut](auto z) { return std::abs(z) > cut; });
}

AssignmentMatrix biregular_random(int n, int k, int delta, int gamma, std::uint64_t seed) {
    require(n >= 1 && k >= 1 && delta >= 1 && gamma >= 1, ErrorKind::InvalidArgument,
            "bi-regular parameters must be positive");
    require(static_cast<long>(k) * gamma == static_cast<long>(n) * delta, ErrorKind::InvalidArgument,
            "infeasible degrees: k*gamma = " + std::to_string(k * gamma) +
                " but n*delta = " + std::to_string(n * delta));
    require(delta <= k && gamma <= n, ErrorKind::InvalidArgument,
            "degree exceeds the opposite side size");

    constexpr int kMaxRetries = 10000;
    Rng rng{derive_seed(seed, {0x62697265ULL})};
    std::vector<int> col_stubs;
    for (int j = 0; j < n; ++j)
        for (int t = 0; t < delta; ++t) col_stubs.push_back(j);
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        std::shuffle(col_stubs.begin(), col_stubs.end(), rng);
        Matrix m(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
        bool simple = true;
        std::size_t pos = 0;
        for (int i = 0; i < k && simple; ++i)
            for (int t = 0; t < gamma; ++t) {
                double& cell = m(static_cast<std::size_t>(i), static_cast<std::size_t>(col_stubs[pos++]));
                if (cell != 0.0) {
                    simple = false;
                    break;
                }
                cell = 1.0;
            }
        if (!simple) continue;
        AssignmentMatrix a;
        a.mat = std::move(m);
        a.delta = delta;
        a.gamma = gamma;
        a.family = Family::BiRegular;
        a.params = BiRegularParams{n, k, delta, gamma, seed};
        return a;
    }
    fail(ErrorKind::Construction, "bi-regular pairing produced repeated edges in all " +
                                      std::to_string(kMaxRetries) + " attempts");
}

ValidationReport validate_regular(const AssignmentMatrix& a) {
    ValidationReport rep;
    if (!is_binary(a.mat)) {
        rep.flag("matrix is not binary");
        return rep;
    }
    if (static_cast<long>(a.k()) * a.gamma != static_cast<long>(a.n()) * a.delta)
        rep.flag("k*gamma != n*delta");
    check_sums(a, a.gamma, a.delta, rep);
    return rep;
}

ValidationReport validate_assignment(const AssignmentMatrix& a) {
    return std::visit(
        [&](const auto& p) -> ValidationReport {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BibdParams>) {
                return validate_bibd(a, p);
            } else if constexpr (std::is_same_v<P, SrgParams>) {
                return validate_srg(a, p);
            } else if constexpr (std::is_same_v<P, CosetParams>) {
                ValidationReport rep = validate_regular(a);
                if (a.gamma != p.m * p.delta) rep.flag("left degree is not m*delta");
                if (a.mat != coset_bipartite(p).mat) rep.flag("matrix differs from the coset construction");
                return rep;
            } else {
                return validate_regular(a);
            }
        },
        a.params);
}

std::optional<DifferenceSet> search_planar_difference_set(int v, int size) {
    require(v >= 3 && size >= 2 && size * (size - 1) == v - 1, ErrorKind::InvalidArgument,
            "planar difference set needs v - 1 = size * (size - 1)");
    // Any planar set has a translate containing 0 and 1 (difference 1 occurs once).
    std::vector<int> chosen{0, 1};
    std::vector<bool> used(static_cast<std::size_t>(v), false);
    used[1] = used[static_cast<std::size_t>(v - 1)] = true;

    std::function<bool(int)> extend = [&](int next) -> bool {
        if (static_cast<int>(chosen.size()) == size) return true;
        for (int x = next; x < v; ++x) {
            std::vector<int> diffs;
            bool clash = false;
            for (int y : chosen) {
                const int d1 = mod(x - y, v);
                const int d2 = mod(y - x, v);
                if (used[static_cast<std::size_t>(d1)] || used[static_cast<std::size_t>(d2)] || d1 == d2 ||
                    std::find(diffs.begin(), diffs.end(), d1) != diffs.end() ||
                    std::find(diffs.begin(), diffs.end(), d2) != diffs.end()) {
                    clash = true;
                    break;
                }
                diffs.push_back(d1);
                diffs.push_back(d2);
            }
            if (clash) continue;
            for (int d : diffs) used[static_cast<std::size_t>(d)] = true;
            chosen.push_back(x);
            if (extend(x + 1)) return true;
            chosen.pop_back();
            for (int d : diffs) used[static_cast<std::size_t>(d)] = false;
        }
        return false;
    };
    if (!extend(2)) return std::nullopt;
    return DifferenceSet{v, chosen};
}

std::optional<DifferenceSet> builtin_difference_set(int v) {
    switch (v) {
        case 7: return DifferenceSet{7, {0, 1, 3}};
        case 13: return DifferenceSet{13, {0, 1, 3, 9}};
        // Singer set for PG(2, 9), found by search_planar_difference_set.
        case 91: return DifferenceSet{91, {0, 1, 3, 9, 27, 49, 56, 61, 77, 81}};
        default: return std::nullopt;
    }
}

}  // namespace agc
