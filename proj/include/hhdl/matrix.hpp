#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hhdl {

// Dense row-major matrix of doubles. Sized for small dictionary work
// (n <= 256 rows) times wide sample sets, so all products are naive
// triple loops with a cache-friendly index order.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> v);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);          // A * B
Matrix multiply_at_b(const Matrix& a, const Matrix& b);     // A' * B
Matrix multiply_a_bt(const Matrix& a, const Matrix& b);     // A * B'
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double c);

double trace(const Matrix& a);
double frobenius_norm_sq(const Matrix& a);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double symmetry_gap(const Matrix& a);                       // max |A - A'|

// Small vector helpers shared across the numeric modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double c, std::span<const double> x, std::span<double> y);   // y += c*x
void scale_in_place(std::span<double> x, double c);

std::string shape_string(const Matrix& a);

} // namespace hhdl
