// Rescaled elastic energies eps^{-alpha} int W(grad^eps u) over the unit
// tube, the one-dimensional limit energy, and power-law rate fitting.

#pragma once

#include <span>
#include <vector>

#include "stringlab/curve.hpp"
#include "stringlab/density.hpp"
#include "stringlab/field.hpp"

namespace stringlab {

// Tensor-product Gauss-Legendre orders; the axis direction is integrated per
// descriptor piece so panels never straddle a breakpoint.
struct Quadrature {
  int q1 = 8, q2 = 8, q3 = 8;
};

struct EnergyResult {
  double value = 0;
  bool infinite = false;
  Vec3 bad_node{};  // quadrature node where the determinant gate failed
};

// eps^{-alpha} sum of weights * W0 at the nodes, infinite (with the node)
// when |det grad^eps u - 1| > det_tol anywhere.
EnergyResult energy(const TubeField& u, double alpha, const StoredDensity& model,
                    const Quadrature& quad, double det_tol, double omega_half = 0.5);

// |omega| int f^c(|u'|) dx1: exact per segment for piecewise-affine curves,
// composite Gauss panels for smooth ones.
double limit_energy(const PiecewiseAffineCurve& curve, const RadialEnvelope& env,
                    double omega_area = 1.0);
double limit_energy(const SmoothCurve& curve, const RadialEnvelope& env,
                    double omega_area = 1.0);
double limit_energy(std::span<const Vec3> slopes, std::span<const double> lengths,
                    const RadialEnvelope& env, double omega_area = 1.0);

// Least-squares slope of log(value) against log(eps), discarding the largest
// eps point; nonpositive values are excluded, fewer than three usable points
// is an error.
double rate_fit(std::span<const double> eps, std::span<const double> values);

}  // namespace stringlab
