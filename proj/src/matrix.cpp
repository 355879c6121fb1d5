#include "agc/matrix.hpp"

#include "agc/error.hpp"
#include "agc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace agc {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        require(row.size() == c, ErrorKind::DimensionMismatch, "ragged row list");
        std::copy(row.begin(), row.end(), m.row(i++).begin());
    }
    return m;
}

Matrix Matrix::column_vector(std::span<const double> v) {
    Matrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::select_columns(std::span<const std::size_t> idx) const {
    Matrix out(rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
        require(idx[j] < cols_, ErrorKind::DimensionMismatch, "column index out of range");
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* src = data_.data() + i * cols_;
        double* dst = out.data_.data() + i * idx.size();
        for (std::size_t j = 0; j < idx.size(); ++j) dst[j] = src[idx[j]];
    }
    return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        require(idx[i] < rows_, ErrorKind::DimensionMismatch, "row index out of range");
        std::copy_n(data_.begin() + idx[i] * cols_, cols_, out.data_.begin() + i * cols_);
    }
    return out;
}

Matrix Matrix::row_block(std::size_t first, std::size_t count) const {
    require(first + count <= rows_, ErrorKind::DimensionMismatch, "row block out of range");
    Matrix out(count, cols_);
    std::copy_n(data_.begin() + first * cols_, count * cols_, out.data_.begin());
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::DimensionMismatch,
            "matrix sum shapes differ");
    Matrix out = a;
    kernels::axpy(1.0, b.data(), out.data());
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::DimensionMismatch,
            "matrix difference shapes differ");
    Matrix out = a;
    kernels::axpy(-1.0, b.data(), out.data());
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    kernels::scale(s, out.data());
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), ErrorKind::DimensionMismatch,
            "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double aip = a(i, p);
            if (aip != 0.0) k.axpy(aip, b.row(p).data(), ci.data(), ci.size());
        }
    }
    return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    require(a.cols() == x.size(), ErrorKind::DimensionMismatch, "matvec: length mismatch");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = kernels::dot(a.row(i), x);
    return y;
}

Matrix gram(const Matrix& a) {
    const Matrix t = a.transpose();
    const std::size_t n = a.cols();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernels::dot(t.row(i), t.row(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), ErrorKind::DimensionMismatch, "vstack: column counts differ");
    Matrix out(a.rows() + b.rows(), a.cols());
    std::copy(a.data().begin(), a.data().end(), out.data().begin());
    std::copy(b.data().begin(), b.data().end(), out.data().begin() + a.size());
    return out;
}

double frobenius_sq(const Matrix& a) { return kernels::sum_squares(a.data()); }

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const Matrix& a) {
    return std::all_of(a.data().begin(), a.data().end(), [](double v) { return std::isfinite(v); });
}

void require_finite(const Matrix& a, const char* what) {
    require(all_finite(a), ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
}

void Tolerance::validate() const {
    require(rank_eps > 0.0 && eq_eps > 0.0, ErrorKind::InvalidArgument,
            "tolerances must be strictly positive");
}

}  // namespace agc
