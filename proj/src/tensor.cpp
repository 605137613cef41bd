#include "nitns/tensor.hpp"

namespace nitns {

Mat3 identity3() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      c[i * 3 + j] = s;
    }
  }
  return c;
}

Vec3 matvec(const Mat3& a, const Vec3& x) {
  return {a[0] * x[0] + a[1] * x[1] + a[2] * x[2], a[3] * x[0] + a[4] * x[1] + a[5] * x[2],
          a[6] * x[0] + a[7] * x[1] + a[8] * x[2]};
}

double det(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double det(const Mat2& m) { return m[0] * m[3] - m[1] * m[2]; }

double trace(const Mat3& m) { return m[0] + m[4] + m[8]; }

Mat3 adjugate(const Mat3& m) {
  return {m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
          m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
          m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
}

Mat3 inverse(const Mat3& m) {
  Mat3 a = adjugate(m);
  const double inv = 1.0 / det(m);
  for (auto& x : a) x *= inv;
  return a;
}

Mat2 inverse(const Mat2& m) {
  const double inv = 1.0 / det(m);
  return {m[3] * inv, -m[1] * inv, -m[2] * inv, m[0] * inv};
}

Vec3 cauchy_action(const Vec3& q, const Mat3& m) {
  // Det(a, b, c) of three column vectors.
  auto det_cols = [](const Vec3& a, const Vec3& b, const Vec3& c) {
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) +
           c[0] * (a[1] * b[2] - a[2] * b[1]);
  };
  const Vec3 c0{m[0], m[3], m[6]};
  const Vec3 c1{m[1], m[4], m[7]};
  const Vec3 c2{m[2], m[5], m[8]};
  // 1/2 eps_ijk Det(M_i, M_j, q) keeps the two equal terms of each k once.
  return {det_cols(c1, c2, q), det_cols(c2, c0, q), det_cols(c0, c1, q)};
}

double cauchy_action(double q, const Mat2& m) { return det(m) * q; }

}  // namespace nitns
