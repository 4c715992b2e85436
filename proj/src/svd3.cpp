#include "stringlab/svd3.hpp"

#include <algorithm>
#include <cmath>

namespace stringlab {

namespace {

// One-sided Jacobi on columns: returns B = F * V with orthogonal columns and
// accumulates V. Sweep order (0,1), (0,2), (1,2) until off-diagonal Gram
// entries are negligible.
void jacobi_columns(Mat3& b, Mat3* v) {
  if (v) *v = Mat3::identity();
  constexpr int kMaxSweeps = 40;
  constexpr double kTol = 1e-30;  // on squared scales
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        Vec3 cp = b.col(p), cq = b.col(q);
        double app = dot(cp, cp), aqq = dot(cq, cq), apq = dot(cp, cq);
        off = std::max(off, apq * apq / std::max(app * aqq, 1e-300));
        if (apq == 0) continue;
        double tau = (aqq - app) / (2 * apq);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        double c = 1 / std::sqrt(1 + t * t);
        double s = c * t;
        b.set_col(p, c * cp - s * cq);
        b.set_col(q, s * cp + c * cq);
        if (v) {
          Vec3 vp = v->col(p), vq = v->col(q);
          v->set_col(p, c * vp - s * vq);
          v->set_col(q, s * vp + c * vq);
        }
      }
    }
    if (off < kTol) break;
  }
}

}  // namespace

Singular3 singular_values(const Mat3& f) {
  Mat3 b = f;
  jacobi_columns(b, nullptr);
  double s[3] = {norm(b.col(0)), norm(b.col(1)), norm(b.col(2))};
  std::sort(s, s + 3, std::greater<double>());
  return {s[0], s[1], s[2]};
}

double dist2_so3(const Mat3& f) {
  Singular3 s = singular_values(f);
  double sign = det(f) >= 0 ? 1.0 : -1.0;
  double d2 = norm2(f) - 2 * (s.s1 + s.s2 + sign * s.s3) + 3;
  return std::max(d2, 0.0);
}

double dist2_so3_orbit(const Mat3& f, const Vec3& d_diag) {
  Mat3 fd = f;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) fd.m[i][j] = f.m[i][j] * d_diag[j];
  Singular3 s = singular_values(fd);
  double sign = det(fd) >= 0 ? 1.0 : -1.0;
  double d2 = norm2(f) + norm2(Vec3{d_diag.x, d_diag.y, d_diag.z}) -
              2 * (s.s1 + s.s2 + sign * s.s3);
  return std::max(d2, 0.0);
}

Mat3 polar_rotation(const Mat3& f) {
  Mat3 b = f;
  Mat3 v;
  jacobi_columns(b, &v);
  // Columns of b are u_i * sigma_i; order descending to put the sign flip on
  // the smallest singular value.
  struct Col {
    Vec3 u;
    double sigma;
    Vec3 v;
  };
  Col cols[3];
  for (int i = 0; i < 3; ++i) {
    double sig = norm(b.col(i));
    cols[i] = {sig > 1e-300 ? b.col(i) / sig : Vec3{}, sig, v.col(i)};
  }
  std::sort(cols, cols + 3, [](const Col& a, const Col& c) { return a.sigma > c.sigma; });
  if (cols[2].sigma <= 1e-300) {
    cols[2].u = normalized(cross(cols[0].u, cols[1].u));
  }
  double sign = det(f) >= 0 ? 1.0 : -1.0;
  Mat3 u = Mat3::from_columns(cols[0].u, cols[1].u, sign * cols[2].u);
  Mat3 vt = transpose(Mat3::from_columns(cols[0].v, cols[1].v, cols[2].v));
  return u * vt;
}

}  // namespace stringlab
