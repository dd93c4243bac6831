#include "aor/matrix.hpp"

#include <cmath>

#include "aor/errors.hpp"

namespace aor {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> init) {
    Matrix m;
    m.rows = init.size();
    m.cols = init.size() ? init.begin()->size() : 0;
    m.data.reserve(m.rows * m.cols);
    for (const auto& row : init) {
        if (row.size() != m.cols) {
            throw DimensionError("from_rows: ragged initializer (expected " +
                                 std::to_string(m.cols) + " columns)");
        }
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

void Matrix::fill(double v) {
    for (auto& x : data) x = v;
}

bool Matrix::all_finite() const {
    for (double x : data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

void ensure_finite(const Matrix& m, const std::string& what) {
    if (!m.all_finite()) {
        throw NumericalError(what + ": non-finite entry");
    }
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                             shape_str(b));
    }
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw DimensionError("matmul: inner dimensions disagree, " + shape_str(a) + " * " +
                             shape_str(b));
    }
    Matrix c(a.rows, b.cols, 0.0);
    const std::size_t n = a.rows, k = a.cols, m = b.cols;
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = &a.data[i * k];
        double* crow = &c.data[i * m];
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = &b.data[p * m];
            for (std::size_t j = 0; j < m; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
    return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) {
        throw DimensionError("matmul_at_b: row counts disagree, " + shape_str(a) + " vs " +
                             shape_str(b));
    }
    Matrix c(a.cols, b.cols, 0.0);
    const std::size_t n = a.rows, r = a.cols, m = b.cols;
    for (std::size_t p = 0; p < n; ++p) {
        const double* arow = &a.data[p * r];
        const double* brow = &b.data[p * m];
        for (std::size_t i = 0; i < r; ++i) {
            const double av = arow[i];
            double* crow = &c.data[i * m];
            for (std::size_t j = 0; j < m; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
    return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) {
        throw DimensionError("matmul_a_bt: column counts disagree, " + shape_str(a) + " vs " +
                             shape_str(b));
    }
    Matrix c(a.rows, b.rows, 0.0);
    const std::size_t n = a.rows, k = a.cols, m = b.rows;
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = &a.data[i * k];
        double* crow = &c.data[i * m];
        for (std::size_t j = 0; j < m; ++j) {
            const double* brow = &b.data[j * k];
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                s += arow[p] * brow[p];
            }
            crow[j] = s;
        }
    }
    return c;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            t.at(c, r) = m.at(r, c);
        }
    }
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.data[i];
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= b.data[i];
    return c;
}

Matrix scale(const Matrix& m, double s) {
    Matrix c = m;
    for (auto& x : c.data) x *= s;
    return c;
}

void add_inplace(Matrix& dst, const Matrix& src) {
    require_same_shape(dst, src, "add_inplace");
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

void add_scaled_inplace(Matrix& dst, const Matrix& src, double s) {
    require_same_shape(dst, src, "add_scaled_inplace");
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += s * src.data[i];
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] *= b.data[i];
    return c;
}

Matrix add_row_broadcast(const Matrix& m, const Matrix& row) {
    if (row.rows != 1 || row.cols != m.cols) {
        throw DimensionError("add_row_broadcast: need 1x" + std::to_string(m.cols) + " row, got " +
                             shape_str(row));
    }
    Matrix c = m;
    for (std::size_t r = 0; r < c.rows; ++r) {
        for (std::size_t j = 0; j < c.cols; ++j) {
            c.at(r, j) += row.at(0, j);
        }
    }
    return c;
}

Matrix col_sums(const Matrix& m) {
    Matrix s(1, m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            s.at(0, j) += m.at(r, j);
        }
    }
    return s;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double x : m.data) s += x * x;
    return std::sqrt(s);
}

double entrywise_l1(const Matrix& m) {
    double s = 0.0;
    for (double x : m.data) s += std::abs(x);
    return s;
}

double dot(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

} // namespace aor
