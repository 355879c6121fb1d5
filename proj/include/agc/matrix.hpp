#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace agc {

// Dense real matrix, row-major. Zero-width or zero-height matrices are legal
// (an empty non-straggler set restricts B to mk x 0).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix column_vector(std::span<const double> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    std::vector<double> column(std::size_t j) const;

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    Matrix select_columns(std::span<const std::size_t> idx) const;
    Matrix select_rows(std::span<const std::size_t> idx) const;
    // Rows [first, first + count).
    Matrix row_block(std::size_t first, std::size_t count) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);
// a^T a
Matrix gram(const Matrix& a);
// Stack a on top of b (equal column counts).
Matrix vstack(const Matrix& a, const Matrix& b);

double frobenius_sq(const Matrix& a);
double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);
void require_finite(const Matrix& a, const char* what);

struct Tolerance {
    // Singular-value (or pivot) cutoff relative to the largest one.
    double rank_eps = 1e-10;
    // Entrywise equality tolerance.
    double eq_eps = 1e-9;

    void validate() const;
};

struct LeastSquaresResult {
    Matrix solution;   // b x c, minimum Frobenius norm; empty when not requested
    double residual;   // min ||M X - Y||_F^2
    std::size_t rank;  // numerical rank of M
};

// Column-pivoted Householder QR of M applied to Y. The residual is the energy
// of Q^T Y outside the leading rank rows; the solution (if requested) comes
// from a complete orthogonal decomposition so it is the Moore-Penrose one.
LeastSquaresResult solve_least_squares(const Matrix& m, const Matrix& y, const Tolerance& tol,
                                       bool want_solution);

Matrix least_squares_min_norm(const Matrix& m, const Matrix& y, const Tolerance& tol = {});
double residual_err(const Matrix& m, const Matrix& y, const Tolerance& tol = {});

struct Svd {
    std::vector<double> sigma;  // descending
    Matrix v;                   // right singular vectors as columns, b x b
};

// One-sided Jacobi; exact enough for rank decisions and null spaces at the
// sizes used here (a few hundred at most).
Svd svd_right(const Matrix& m);
std::vector<double> singular_values(const Matrix& m);
double spectral_norm(const Matrix& m);
std::size_t rank_of(const Matrix& m, const Tolerance& tol = {});

// Orthonormal columns spanning Null(M); b x 0 when M has full column rank.
Matrix null_space_basis(const Matrix& m, const Tolerance& tol = {});

// Solve K x = rhs for symmetric positive definite K (Cholesky). Throws
// ErrorKind::Singular when K is not numerically positive definite.
std::vector<double> solve_spd(const Matrix& k, std::span<const double> rhs);

// lambda_r = sum_j first_row[j] * omega^(r j), omega = exp(-2 pi i / k).
std::vector<std::complex<double>> circulant_eigenvalues(std::span<const double> first_row);

}  // namespace agc
