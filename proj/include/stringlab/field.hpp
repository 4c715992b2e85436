// Deformation fields of a thin tube: an analytic descriptor v on Q_L'
// together with the cross-section scale epsilon. Values and rescaled
// gradients come from closed-form partials of the descriptor, never from
// differencing samples.

#pragma once

#include <memory>
#include <vector>

#include "stringlab/geometry.hpp"
#include "stringlab/grid.hpp"

namespace stringlab {

// The determinant of the rescaled gradient restricted to a fiber
// {x1, x2 fixed}: det(s) = a + b * s. Every deformation family in this
// project has exactly this structure (only the first gradient column
// depends on the cross-section variables, affinely), which the inner
// perturbation solver exploits; it is a checked invariant, not an
// approximation.
struct DetFiber {
  double a = 1, b = 0;

  double operator()(double s) const { return a + b * s; }
};

class TubeField {
 public:
  virtual ~TubeField() = default;

  double epsilon() const { return eps_; }
  const BoxGrid& domain() const { return grid_; }

  Vec3 value(const Vec3& x) const {
    check_domain(x);
    return value_impl(x);
  }
  Mat3 rescaled_gradient_at(const Vec3& x) const {
    check_domain(x);
    return gradient_impl(x);
  }
  double det_rescaled(const Vec3& x) const {
    check_domain(x);
    return det_impl(x);
  }
  // Gradient of det(rescaled gradient) w.r.t. x.
  Vec3 grad_det(const Vec3& x) const {
    check_domain(x);
    return grad_det_impl(x);
  }
  virtual DetFiber det_fiber(double x1, double x2) const = 0;

  // Axis positions where the descriptor changes piece; quadrature panels and
  // scans should not straddle them. Always includes 0 and L.
  virtual std::vector<double> x1_breakpoints() const {
    return {0.0, grid_.length};
  }

 protected:
  TubeField(double eps, BoxGrid grid) : eps_(eps), grid_(std::move(grid)) {
    if (!(eps_ > 0)) throw std::invalid_argument("TubeField: epsilon must be positive");
  }

  virtual Vec3 value_impl(const Vec3& x) const = 0;
  virtual Mat3 gradient_impl(const Vec3& x) const = 0;
  virtual double det_impl(const Vec3& x) const { return det(gradient_impl(x)); }
  virtual Vec3 grad_det_impl(const Vec3& x) const = 0;

  void check_domain(const Vec3& x) const {
    if (!grid_.contains_prime(x))
      throw std::domain_error("TubeField: point outside Q_L'");
  }

  double eps_;
  BoxGrid grid_;
};

// The rescaled gradient (d1 v | d2 v / eps | d3 v / eps) of a field at x.
inline Mat3 rescaled_gradient(const TubeField& field, const Vec3& x) {
  return field.rescaled_gradient_at(x);
}

// v(x) = M (x1, eps x2, eps x3)^T + c: the affine tube, whose rescaled
// gradient is the constant M.
class AffineTube : public TubeField {
 public:
  AffineTube(const Mat3& map, const Vec3& shift, double eps, BoxGrid grid)
      : TubeField(eps, std::move(grid)), map_(map), shift_(shift) {}

 protected:
  Vec3 value_impl(const Vec3& x) const override {
    return map_ * Vec3{x.x, eps_ * x.y, eps_ * x.z} + shift_;
  }
  Mat3 gradient_impl(const Vec3&) const override { return map_; }
  double det_impl(const Vec3&) const override { return det(map_); }
  Vec3 grad_det_impl(const Vec3&) const override { return {}; }

 public:
  DetFiber det_fiber(double, double) const override { return {det(map_), 0}; }

 private:
  Mat3 map_;
  Vec3 shift_;
};

}  // namespace stringlab
