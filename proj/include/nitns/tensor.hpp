#pragma once

#include <array>

namespace nitns {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3 matrix, M[r * 3 + c].
using Mat3 = std::array<double, 9>;
using Mat2 = std::array<double, 4>;

Mat3 identity3();
Mat3 matmul(const Mat3& a, const Mat3& b);
Vec3 matvec(const Mat3& a, const Vec3& x);
double det(const Mat3& m);
double det(const Mat2& m);
double trace(const Mat3& m);
/// Transposed cofactor matrix; adj(M) M = det(M) I for every M.
Mat3 adjugate(const Mat3& m);
/// Explicit inverse; only meaningful for invertible M.
Mat3 inverse(const Mat3& m);
Mat2 inverse(const Mat2& m);

/// Cauchy action C(q, M) = det(M) M^{-1} q, evaluated through the quadratic
/// cofactor form C(q, M)_k = 1/2 eps_ijk Det(M_.i, M_.j, q). Defined and
/// finite for singular M.
Vec3 cauchy_action(const Vec3& q, const Mat3& m);
/// Two-dimensional analogue acting on a scalar (out-of-plane) q.
double cauchy_action(double q, const Mat2& m);

}  // namespace nitns
