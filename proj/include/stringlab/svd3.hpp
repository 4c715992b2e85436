// Singular values of 3x3 matrices by one-sided Jacobi with a fixed sweep
// order, and squared Frobenius distances to rotation orbits built on them.

#pragma once

#include "stringlab/geometry.hpp"

namespace stringlab {

// Singular values sorted descending.
struct Singular3 {
  double s1, s2, s3;
};

Singular3 singular_values(const Mat3& f);

// min_{R in SO(3)} |F - R|^2 = |F|^2 - 2(s1 + s2 + sign(det F) s3) + 3.
double dist2_so3(const Mat3& f);

// min_{R in SO(3)} |F - R D|^2 for a fixed diagonal D (the orbit of scaled
// rotations); equals |F|^2 + |D|^2 - 2(s1 + s2 + sign(det(F D)) s3)(F D).
double dist2_so3_orbit(const Mat3& f, const Vec3& d_diag);

// Nearest rotation U diag(1,1,sign) V^T; requires F not rank deficient in a
// way that leaves the polar factor ambiguous.
Mat3 polar_rotation(const Mat3& f);

}  // namespace stringlab
