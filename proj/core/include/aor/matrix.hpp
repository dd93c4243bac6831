#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace aor {

/// Dense row-major matrix of 64-bit reals.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t rows_, std::size_t cols_, double fill = 0.0)
        : rows(rows_), cols(cols_), data(rows_ * cols_, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> init);
    static Matrix identity(std::size_t n);

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool empty() const { return rows == 0 || cols == 0; }
    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }

    void fill(double v);
    bool all_finite() const;
};

bool operator==(const Matrix& a, const Matrix& b);

std::string shape_str(const Matrix& m);

// Throws NumericalError when any entry is NaN/Inf; `what` names the operand.
void ensure_finite(const Matrix& m, const std::string& what);

Matrix matmul(const Matrix& a, const Matrix& b);          // a * b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);      // a^T * b
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);      // a * b^T
Matrix transpose(const Matrix& m);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, double s);
void add_inplace(Matrix& dst, const Matrix& src);
void add_scaled_inplace(Matrix& dst, const Matrix& src, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);

Matrix add_row_broadcast(const Matrix& m, const Matrix& row); // row is 1 x cols
Matrix col_sums(const Matrix& m);                             // 1 x cols

double frobenius_norm(const Matrix& m);
double entrywise_l1(const Matrix& m);
double dot(const Matrix& a, const Matrix& b);

} // namespace aor
