#include "aor/ortho.hpp"

#include <cmath>

#include "aor/errors.hpp"

namespace aor {

namespace {

void require_shared_rows(const Matrix& w1, const Matrix& w2) {
    if (w1.rows != w2.rows) {
        throw DimensionError("l_ortho: matrices must share the feature row count, got " +
                             shape_str(w1) + " and " + shape_str(w2));
    }
}

Matrix sign_matrix(const Matrix& m) {
    Matrix s(m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        const double v = m.data[i];
        s.data[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
    return s;
}

} // namespace

AorValue l_ortho(const Matrix& w1, const Matrix& w2) {
    require_shared_rows(w1, w2);
    AorValue out;
    out.cross = matmul_at_b(w1, w2);
    const double n1 = frobenius_norm(w1);
    const double n2 = frobenius_norm(w2);
    out.l_ortho = (n1 == 0.0 || n2 == 0.0) ? 0.0 : entrywise_l1(out.cross) / (n1 * n2);
    return out;
}

std::pair<Matrix, Matrix> l_ortho_grad(const Matrix& w1, const Matrix& w2) {
    require_shared_rows(w1, w2);
    const double n1 = frobenius_norm(w1);
    const double n2 = frobenius_norm(w2);
    if (n1 == 0.0 || n2 == 0.0) {
        return {Matrix(w1.rows, w1.cols, 0.0), Matrix(w2.rows, w2.cols, 0.0)};
    }
    const Matrix m = matmul_at_b(w1, w2);
    const Matrix s = sign_matrix(m);
    const double a = entrywise_l1(m);
    const double inv = 1.0 / (n1 * n2);

    Matrix g1 = matmul_a_bt(w2, s); // d x h1
    for (std::size_t i = 0; i < g1.data.size(); ++i) {
        g1.data[i] = g1.data[i] * inv - a / (n1 * n1 * n1 * n2) * w1.data[i];
    }
    Matrix g2 = matmul(w1, s); // d x h2
    for (std::size_t i = 0; i < g2.data.size(); ++i) {
        g2.data[i] = g2.data[i] * inv - a / (n1 * n2 * n2 * n2) * w2.data[i];
    }
    return {std::move(g1), std::move(g2)};
}

} // namespace aor
