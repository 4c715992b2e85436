// Exponential and logarithm of 3x3 matrices: closed-form axis-angle for
// rotations, Pade order 6 with scaling and squaring otherwise.

#pragma once

#include <optional>

#include "stringlab/geometry.hpp"

namespace stringlab {

Mat3 skew(const Vec3& w);
Vec3 unskew(const Mat3& a);

Mat3 so3_exp(const Vec3& w);
Vec3 so3_log(const Mat3& r);
Mat3 rotation_about(const Vec3& axis, double angle);

// exp by [6/6] Pade with scaling and squaring; deterministic.
Mat3 mat_exp(const Mat3& a);

// Principal logarithm by inverse scaling and squaring (Denman-Beavers square
// roots, then a Pade-type Gauss-Legendre form). Empty when the principal
// branch does not exist (an eigenvalue on the closed negative real axis).
std::optional<Mat3> mat_log(const Mat3& a);

bool has_nonpositive_real_eigenvalue(const Mat3& a);

// Nearest rotation / unit-determinant normalizations used to validate path
// endpoints.
bool is_rotation(const Mat3& a, double tol);
bool is_unimodular(const Mat3& a, double tol);

}  // namespace stringlab
