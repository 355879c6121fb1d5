#include "agc/error.hpp"
#include "agc/kernels.hpp"
#include "agc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace agc {
namespace {

// Column-major scratch copy; every Householder or Jacobi step touches whole
// columns, which are contiguous here.
struct ColMajor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    ColMajor(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    explicit ColMajor(const Matrix& m) : ColMajor(m.rows(), m.cols()) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) a[j * rows + i] = m(i, j);
    }

    double* col(std::size_t j) noexcept { return a.data() + j * rows; }
    const double* col(std::size_t j) const noexcept { return a.data() + j * rows; }
};

struct Reflector {
    std::vector<double> v;  // acts on entries [offset, offset + v.size())
    double tau = 0.0;
};

// Turns x (length len) into the Householder vector in place; returns the new
// leading entry of the reflected column.
double make_reflector(double* x, std::size_t len, double& tau) {
    const auto& k = kernels::active();
    const double norm = std::sqrt(k.sum_squares(x, len));
    if (norm == 0.0) {
        tau = 0.0;
        return 0.0;
    }
    const double alpha = x[0] > 0.0 ? -norm : norm;
    x[0] -= alpha;
    const double vv = k.sum_squares(x, len);
    tau = vv > 0.0 ? 2.0 / vv : 0.0;
    return alpha;
}

void apply_reflector(const double* v, double tau, double* y, std::size_t len) {
    if (tau == 0.0) return;
    const auto& k = kernels::active();
    const double w = k.dot(v, y, len);
    k.axpy(-tau * w, v, y, len);
}

void check_conform(const Matrix& m, const Matrix& y) {
    require(m.rows() == y.rows(), ErrorKind::DimensionMismatch,
            "least squares: M has " + std::to_string(m.rows()) + " rows, Y has " +
                std::to_string(y.rows()));
    require_finite(m, "M");
    require_finite(y, "Y");
}

}  // namespace

LeastSquaresResult solve_least_squares(const Matrix& m, const Matrix& y, const Tolerance& tol,
                                       bool want_solution) {
    tol.validate();
    check_conform(m, y);
    const std::size_t a = m.rows();
    const std::size_t b = m.cols();
    const std::size_t c = y.cols();
    const auto& k = kernels::active();

    LeastSquaresResult out{want_solution ? Matrix(b, c) : Matrix(), 0.0, 0};
    if (a == 0 || b == 0) {
        out.residual = frobenius_sq(y);
        return out;
    }

    ColMajor w(m);
    ColMajor rhs(y);
    std::vector<std::size_t> perm(b);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> diag;
    std::vector<double> norms(b);
    const std::size_t steps = std::min(a, b);
    double lead = 0.0;
    std::size_t rank = 0;

    for (std::size_t t = 0; t < steps; ++t) {
        const std::size_t len = a - t;
        for (std::size_t j = t; j < b; ++j) norms[j] = k.sum_squares(w.col(j) + t, len);
        const std::size_t p = static_cast<std::size_t>(
            std::max_element(norms.begin() + static_cast<std::ptrdiff_t>(t), norms.end()) -
            norms.begin());
        const double pivot = std::sqrt(norms[p]);
        if (t == 0) lead = pivot;
        if (pivot == 0.0 || pivot <= tol.rank_eps * lead) break;
        if (p != t) {
            std::swap_ranges(w.col(t), w.col(t) + a, w.col(p));
            std::swap(perm[t], perm[p]);
            std::swap(norms[t], norms[p]);
        }
        double tau = 0.0;
        double* v = w.col(t) + t;
        diag.push_back(make_reflector(v, len, tau));
        for (std::size_t j = t + 1; j < b; ++j) apply_reflector(v, tau, w.col(j) + t, len);
        for (std::size_t j = 0; j < c; ++j) apply_reflector(v, tau, rhs.col(j) + t, len);
        rank = t + 1;
    }

    out.rank = rank;
    double res = 0.0;
    for (std::size_t j = 0; j < c; ++j) res += k.sum_squares(rhs.col(j) + rank, a - rank);
    out.residual = res;
    if (!want_solution || rank == 0) return out;

    // R = [R11 R12], rank x b, with R(t,t) = diag[t] and R(t,j) = w.col(j)[t].
    auto r_entry = [&](std::size_t i, std::size_t j) -> double {
        if (j < i) return 0.0;
        return j == i ? diag[i] : w.col(j)[i];
    };

    std::vector<double> z(b);
    if (rank == b) {
        for (std::size_t col = 0; col < c; ++col) {
            const double* cc = rhs.col(col);
            for (std::size_t ii = rank; ii-- > 0;) {
                double acc = cc[ii];
                for (std::size_t j = ii + 1; j < rank; ++j) acc -= r_entry(ii, j) * z[j];
                z[ii] = acc / diag[ii];
            }
            for (std::size_t j = 0; j < b; ++j) out.solution(perm[j], col) = z[j];
        }
        return out;
    }

    // Complete orthogonal decomposition: QR of R^T (b x rank) gives
    // R = [L^T 0] W^T and the min-norm solution z = W [L^{-T} c; 0].
    ColMajor rt(b, rank);
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = 0; j < b; ++j) rt.col(i)[j] = r_entry(i, j);
    std::vector<Reflector> refl(rank);
    std::vector<double> ldiag(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        const std::size_t len = b - i;
        double* v = rt.col(i) + i;
        double tau = 0.0;
        ldiag[i] = make_reflector(v, len, tau);
        for (std::size_t j = i + 1; j < rank; ++j) apply_reflector(v, tau, rt.col(j) + i, len);
        refl[i].v.assign(v, v + len);
        refl[i].tau = tau;
    }
    for (std::size_t col = 0; col < c; ++col) {
        const double* cc = rhs.col(col);
        std::fill(z.begin(), z.end(), 0.0);
        // L^T is lower triangular with L(j,i) = rt.col(i)[j] for j < i.
        for (std::size_t i = 0; i < rank; ++i) {
            double acc = cc[i];
            for (std::size_t j = 0; j < i; ++j) acc -= rt.col(i)[j] * z[j];
            z[i] = acc / ldiag[i];
        }
        for (std::size_t i = rank; i-- > 0;)
            apply_reflector(refl[i].v.data(), refl[i].tau, z.data() + i, b - i);
        for (std::size_t j = 0; j < b; ++j) out.solution(perm[j], col) = z[j];
    }
    return out;
}

Matrix least_squares_min_norm(const Matrix& m, const Matrix& y, const Tolerance& tol) {
    return solve_least_squares(m, y, tol, true).solution;
}

double residual_err(const Matrix& m, const Matrix& y, const Tolerance& tol) {
    return solve_least_squares(m, y, tol, false).residual;
}

Svd svd_right(const Matrix& m) {
    require_finite(m, "M");
    const std::size_t a = m.rows();
    const std::size_t b = m.cols();
    const auto& k = kernels::active();
    ColMajor w(m);
    ColMajor v(b, b);
    for (std::size_t j = 0; j < b; ++j) v.col(j)[j] = 1.0;

    constexpr int kMaxSweeps = 80;
    constexpr double kOrthEps = 1e-15;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < b; ++p) {
            for (std::size_t q = p + 1; q < b; ++q) {
                const double alpha = k.sum_squares(w.col(p), a);
                const double beta = k.sum_squares(w.col(q), a);
                const double gamma = k.dot(w.col(p), w.col(q), a);
                if (gamma == 0.0 || std::abs(gamma) <= kOrthEps * std::sqrt(alpha * beta)) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                k.rot(w.col(p), w.col(q), a, cs, sn);
                k.rot(v.col(p), v.col(q), b, cs, sn);
                rotated = true;
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(b);
    for (std::size_t j = 0; j < b; ++j) sigma[j] = std::sqrt(k.sum_squares(w.col(j), a));
    std::vector<std::size_t> order(b);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
    Svd out{std::vector<double>(b), Matrix(b, b)};
    for (std::size_t j = 0; j < b; ++j) {
        out.sigma[j] = sigma[order[j]];
        const double* vc = v.col(order[j]);
        for (std::size_t i = 0; i < b; ++i) out.v(i, j) = vc[i];
    }
    return out;
}

std::vector<double> singular_values(const Matrix& m) {
    // Jacobi works on columns; the wide case is cheaper on the transpose.
    if (m.cols() > m.rows()) {
        auto s = svd_right(m.transpose()).sigma;
        s.resize(std::min(m.rows(), m.cols()));
        return s;
    }
    return svd_right(m).sigma;
}

double spectral_norm(const Matrix& m) {
    const auto s = singular_values(m);
    return s.empty() ? 0.0 : s.front();
}

std::size_t rank_of(const Matrix& m, const Tolerance& tol) {
    tol.validate();
    const auto s = singular_values(m);
    if (s.empty() || s.front() == 0.0) return 0;
    const double cut = tol.rank_eps * s.front();
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [cut](double x) { return x > cut; }));
}

Matrix null_space_basis(const Matrix& m, const Tolerance& tol) {
    tol.validate();
    const Svd svd = svd_right(m);
    const std::size_t b = m.cols();
    const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    std::size_t rank = 0;
    while (rank < b && smax > 0.0 && svd.sigma[rank] > tol.rank_eps * smax) ++rank;
    Matrix basis(b, b - rank);
    for (std::size_t j = rank; j < b; ++j)
        for (std::size_t i = 0; i < b; ++i) basis(i, j - rank) = svd.v(i, j);
    return basis;
}

std::vector<double> solve_spd(const Matrix& kmat, std::span<const double> rhs) {
    const std::size_t n = kmat.rows();
    require(kmat.cols() == n && rhs.size() == n, ErrorKind::DimensionMismatch,
            "solve_spd: shape mismatch");
    require_finite(kmat, "K");
    double maxdiag = 0.0;
    for (std::size_t i = 0; i < n; ++i) maxdiag = std::max(maxdiag, kmat(i, i));
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = kmat(j, j) - kernels::dot(l.row(j).first(j), l.row(j).first(j));
        if (!(d > 1e-14 * maxdiag))
            fail(ErrorKind::Singular, "matrix is not numerically positive definite (pivot " +
                                          std::to_string(j) + ")");
        d = std::sqrt(d);
        l(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i)
            l(i, j) = (kmat(i, j) - kernels::dot(l.row(i).first(j), l.row(j).first(j))) / d;
    }
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        x[i] -= kernels::dot(l.row(i).first(i), std::span<const double>(x).first(i));
        x[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = x[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= l(j, i) * x[j];
        x[i] = acc / l(i, i);
    }
    return x;
}

std::vector<std::complex<double>> circulant_eigenvalues(std::span<const double> first_row) {
    const std::size_t k = first_row.size();
    require(k >= 1, ErrorKind::InvalidArgument, "circulant_eigenvalues: empty first row");
    std::vector<std::complex<double>> out(k);
    for (std::size_t r = 0; r < k; ++r) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < k; ++j) {
            if (first_row[j] == 0.0) continue;
            // Reduce the exponent mod k first so the angle stays exact-ish.
            const double angle =
                -2.0 * std::numbers::pi * static_cast<double>((r * j) % k) / static_cast<double>(k);
            acc += first_row[j] * std::polar(1.0, angle);
        }
        out[r] = acc;
    }
    return out;
}

}  // namespace agc
