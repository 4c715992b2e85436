#include "stringlab/matfun.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "stringlab/quadrature.hpp"

namespace stringlab {

Mat3 skew(const Vec3& w) {
  Mat3 a;
  a.m[0][1] = -w.z; a.m[0][2] = w.y;
  a.m[1][0] = w.z;  a.m[1][2] = -w.x;
  a.m[2][0] = -w.y; a.m[2][1] = w.x;
  return a;
}

Vec3 unskew(const Mat3& a) {
  return {0.5 * (a.m[2][1] - a.m[1][2]), 0.5 * (a.m[0][2] - a.m[2][0]),
          0.5 * (a.m[1][0] - a.m[0][1])};
}

Mat3 so3_exp(const Vec3& w) {
  double th2 = norm2(w);
  double th = std::sqrt(th2);
  Mat3 k = skew(w);
  Mat3 i = Mat3::identity();
  if (th < 1e-8) {
    // second-order series keeps orthogonality to machine precision here
    return i + k + 0.5 * (k * k);
  }
  return i + (std::sin(th) / th) * k + ((1 - std::cos(th)) / th2) * (k * k);
}

Vec3 so3_log(const Mat3& r) {
  double c = 0.5 * (trace(r) - 1.0);
  c = std::max(-1.0, std::min(1.0, c));
  double th = std::acos(c);
  Vec3 w{r.m[2][1] - r.m[1][2], r.m[0][2] - r.m[2][0], r.m[1][0] - r.m[0][1]};
  if (th < 1e-8) return 0.5 * w;
  if (M_PI - th < 1e-6) {
    // near a half turn the skew part degenerates; use the symmetric part
    Mat3 b = 0.5 * (r + transpose(r));  // = I + (1-cos)/th^2 * (w w^T - |w|^2 I) form
    // axis from the dominant diagonal of (b + I)/2 scaled
    Mat3 q = 0.5 * (b + Mat3::identity());
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (q.m[i][i] > q.m[k][k]) k = i;
    Vec3 axis{q.m[0][k], q.m[1][k], q.m[2][k]};
    axis = axis / std::sqrt(std::max(q.m[k][k], 1e-300));
    axis = normalized(axis);
    // fix the sign with the skew part when it is not fully degenerate
    if (dot(axis, w) < 0) axis = -axis;
    return th * axis;
  }
  return (0.5 * th / std::sin(th)) * w;
}

Mat3 rotation_about(const Vec3& axis, double angle) {
  return so3_exp(normalized(axis) * angle);
}

Mat3 mat_exp(const Mat3& a) {
  // scale so the norm is below 1/2, Pade [6/6], square back
  double nrm = norm(a);
  int s = 0;
  while (nrm > 0.5 && s < 60) {
    nrm /= 2;
    ++s;
  }
  Mat3 x = a * std::pow(0.5, s);

  // Pade [6/6]: p(x) q(x)^{-1} with p even/odd split
  static const double c[7] = {1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0,
                              1.0 / 15840.0, 1.0 / 665280.0};
  Mat3 x2 = x * x;
  Mat3 even = Mat3::identity() * c[0] + x2 * c[2] + (x2 * x2) * c[4] + (x2 * x2 * x2) * c[6];
  Mat3 odd = x * (Mat3::identity() * c[1] + x2 * c[3] + (x2 * x2) * c[5]);
  Mat3 p = even + odd;
  Mat3 q = even - odd;
  Mat3 r = inverse(q) * p;
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

bool has_nonpositive_real_eigenvalue(const Mat3& a) {
  // roots of the characteristic polynomial via Cardano in complex arithmetic
  double c2 = trace(a);
  double c1 = 0.5 * (c2 * c2 - trace(a * a));
  double c0 = det(a);
  // lambda^3 - c2 l^2 + c1 l - c0 = 0
  std::complex<double> b = -c2, c = c1, d = -c0;
  std::complex<double> p = c - b * b / 3.0;
  std::complex<double> q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  std::complex<double> disc = q * q / 4.0 + p * p * p / 27.0;
  std::complex<double> sq = std::sqrt(disc);
  std::complex<double> u = std::pow(-q / 2.0 + sq, 1.0 / 3.0);
  if (std::abs(u) < 1e-150) u = std::pow(-q / 2.0 - sq, 1.0 / 3.0);
  double scale = std::max(1.0, norm(a));
  for (int k = 0; k < 3; ++k) {
    std::complex<double> rot = std::polar(1.0, 2.0 * M_PI * k / 3.0);
    std::complex<double> w = u * rot;
    std::complex<double> lambda = (std::abs(w) < 1e-150 ? 0.0 : w - p / (3.0 * w)) - b / 3.0;
    if (std::abs(lambda.imag()) < 1e-9 * scale && lambda.real() <= 1e-12 * scale) return true;
  }
  return false;
}

std::optional<Mat3> mat_log(const Mat3& a) {
  if (has_nonpositive_real_eigenvalue(a)) return std::nullopt;

  // Denman-Beavers square roots until close to the identity
  Mat3 b = a;
  int sqrts = 0;
  while (norm(b - Mat3::identity()) > 0.05 && sqrts < 60) {
    Mat3 y = b, z = Mat3::identity();
    for (int it = 0; it < 60; ++it) {
      Mat3 yn = 0.5 * (y + inverse(z));
      Mat3 zn = 0.5 * (z + inverse(y));
      double change = norm(yn - y);
      y = yn;
      z = zn;
      if (change < 1e-15) break;
    }
    if (!finite(y)) return std::nullopt;
    b = y;
    ++sqrts;
  }
  if (norm(b - Mat3::identity()) > 0.05) return std::nullopt;

  // log(I + X) by the Pade-type Gauss-Legendre form sum w_i X (I + x_i X)^{-1}
  Mat3 x = b - Mat3::identity();
  Mat3 r;
  for (const auto& node : gauss_legendre(6, 0.0, 1.0)) {
    Mat3 m = Mat3::identity() + node.x * x;
    r = r + node.w * (x * inverse(m));
  }
  return r * std::pow(2.0, sqrts);
}

bool is_rotation(const Mat3& a, double tol) {
  Mat3 g = transpose(a) * a - Mat3::identity();
  return norm(g) <= tol && std::abs(det(a) - 1.0) <= tol;
}

bool is_unimodular(const Mat3& a, double tol) { return std::abs(det(a) - 1.0) <= tol; }

}  // namespace stringlab
