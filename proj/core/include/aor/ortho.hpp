#pragma once

#include <utility>

#include "aor/matrix.hpp"

namespace aor {

/// Value of the attribute-orthogonal penalty together with the
/// cross-correlation matrix it is built from.
struct AorValue {
    double l_ortho = 0.0; // ||W1^T W2||_1 / (||W1||_F * ||W2||_F), 0 if a norm is 0
    Matrix cross;         // M = W1^T W2, h1 x h2
};

/// Normalized cross-correlation of two weight matrices sharing a row count d:
/// the entrywise L1 norm of M = W1^T W2 divided by the product of the
/// Frobenius norms. Defined as 0 when either matrix has zero norm. Throws
/// DimensionError when the row counts differ.
AorValue l_ortho(const Matrix& w1, const Matrix& w2);

/// Exact subgradient of l_ortho with respect to both matrices, using
/// sign(0) = 0. With S = sign(M), n1 = ||W1||_F, n2 = ||W2||_F, A = ||M||_1:
///   G1 = (W2 S^T) / (n1 n2) - (A / (n1^3 n2)) W1
///   G2 = (W1 S)  / (n1 n2) - (A / (n1 n2^3)) W2
/// Both gradients are zero matrices when either norm is 0.
std::pair<Matrix, Matrix> l_ortho_grad(const Matrix& w1, const Matrix& w2);

} // namespace aor
