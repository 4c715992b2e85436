// Discrete C^k and H^1 norms over node samples.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "stringlab/geometry.hpp"

namespace stringlab {

// max |value| over nodes, plus max |gradient| when order == 1.
inline double sup_norm(std::span<const double> values, std::span<const Vec3> gradients,
                       int order) {
  if (values.empty()) throw std::invalid_argument("sup_norm: empty grid sample");
  if (order != 0 && order != 1) throw std::invalid_argument("sup_norm: order must be 0 or 1");
  if (order == 1 && gradients.size() != values.size())
    throw std::invalid_argument("sup_norm: gradient samples missing");
  double v = 0;
  for (double s : values) v = std::max(v, std::abs(s));
  if (order == 0) return v;
  double g = 0;
  for (const Vec3& gr : gradients) g = std::max(g, norm(gr));
  return v + g;
}

inline double sup_norm(std::span<const double> values) {
  return sup_norm(values, {}, 0);
}

// A curve sampled on a 1d grid together with derivative samples.
struct SampledCurve {
  std::vector<double> t;
  std::vector<Vec3> u;
  std::vector<Vec3> du;
};

// sqrt(||a-b||_{L2}^2 + ||a'-b'||_{L2}^2) by the composite trapezoid rule.
inline double h1_distance(const SampledCurve& a, const SampledCurve& b) {
  if (a.t.size() != b.t.size() || a.t.size() < 2)
    throw std::invalid_argument("h1_distance: mismatched grids");
  for (std::size_t i = 0; i < a.t.size(); ++i)
    if (a.t[i] != b.t[i]) throw std::invalid_argument("h1_distance: mismatched grids");
  if (a.u.size() != a.t.size() || a.du.size() != a.t.size() || b.u.size() != b.t.size() ||
      b.du.size() != b.t.size())
    throw std::invalid_argument("h1_distance: sample sizes inconsistent");

  double acc = 0;
  for (std::size_t i = 0; i + 1 < a.t.size(); ++i) {
    double h = a.t[i + 1] - a.t[i];
    double f0 = norm2(a.u[i] - b.u[i]) + norm2(a.du[i] - b.du[i]);
    double f1 = norm2(a.u[i + 1] - b.u[i + 1]) + norm2(a.du[i + 1] - b.du[i + 1]);
    acc += 0.5 * h * (f0 + f1);
  }
  return std::sqrt(acc);
}

}  // namespace stringlab
