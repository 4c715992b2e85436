// Small fixed-size linear algebra: 3-vectors, 3x3 and 3x2 matrices.
// All operations are exact closed-form expressions; no dynamic storage.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace stringlab {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  if (n == 0) throw std::invalid_argument("normalized: zero vector");
  return v / n;
}

inline bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

constexpr Vec3 e1{1, 0, 0};
constexpr Vec3 e2{0, 1, 0};
constexpr Vec3 e3{0, 0, 1};

// Column-major 3x3 matrix; col(i) gives the i-th column as a Vec3.
struct Mat3 {
  // m[i][j] = entry in row i, column j
  std::array<std::array<double, 3>, 3> m{};

  static Mat3 identity() {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = 1;
    return r;
  }
  static Mat3 from_columns(const Vec3& a, const Vec3& b, const Vec3& c) {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
      r.m[i][0] = a[i];
      r.m[i][1] = b[i];
      r.m[i][2] = c[i];
    }
    return r;
  }
  static Mat3 diag(double a, double b, double c) {
    Mat3 r;
    r.m[0][0] = a; r.m[1][1] = b; r.m[2][2] = c;
    return r;
  }

  Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
  void set_col(int j, const Vec3& v) {
    m[0][j] = v.x; m[1][j] = v.y; m[2][j] = v.z;
  }

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
    return r;
  }
  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
        r.m[i][j] = s;
      }
    return r;
  }
};

inline Mat3 operator*(double s, const Mat3& a) { return a * s; }

inline Mat3 transpose(const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
  return r;
}

inline double det(const Mat3& a) {
  return dot(a.col(0), cross(a.col(1), a.col(2)));
}

inline double det_cols(const Vec3& a, const Vec3& b, const Vec3& c) {
  return dot(a, cross(b, c));
}

inline double trace(const Mat3& a) { return a.m[0][0] + a.m[1][1] + a.m[2][2]; }

// Frobenius norm.
inline double norm2(const Mat3& a) {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a.m[i][j] * a.m[i][j];
  return s;
}
inline double norm(const Mat3& a) { return std::sqrt(norm2(a)); }

inline bool finite(const Mat3& a) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!std::isfinite(a.m[i][j])) return false;
  return true;
}

inline Mat3 inverse(const Mat3& a) {
  double d = det(a);
  if (d == 0 || !std::isfinite(d)) throw std::domain_error("inverse: singular matrix");
  Vec3 c0 = cross(a.col(1), a.col(2));
  Vec3 c1 = cross(a.col(2), a.col(0));
  Vec3 c2 = cross(a.col(0), a.col(1));
  // rows of the inverse are the cofactor cross products / det
  Mat3 r;
  for (int j = 0; j < 3; ++j) {
    r.m[0][j] = c0[j] / d;
    r.m[1][j] = c1[j] / d;
    r.m[2][j] = c2[j] / d;
  }
  return r;
}

inline Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a[i] * b[j];
  return r;
}

// Two cross-section columns of a deformation gradient.
struct Mat3x2 {
  Vec3 a1, a2;  // columns

  Vec3 col(int j) const { return j == 0 ? a1 : a2; }
};

inline double norm2(const Mat3x2& a) { return norm2(a.a1) + norm2(a.a2); }
inline double norm(const Mat3x2& a) { return std::sqrt(norm2(a)); }

// Assemble (xi | A) as a 3x3 matrix.
inline Mat3 with_first_column(const Vec3& xi, const Mat3x2& a) {
  return Mat3::from_columns(xi, a.a1, a.a2);
}

// A deterministic unit vector orthogonal to v: project out the reference
// axis least aligned with v.
inline Vec3 orthogonal_unit(const Vec3& v) {
  Vec3 d = normalized(v);
  Vec3 ref = std::abs(d.y) <= std::abs(d.z) ? e2 : e3;
  Vec3 w = ref - dot(ref, d) * d;
  return normalized(w);
}

}  // namespace stringlab
