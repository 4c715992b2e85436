// Independent oracles used by the test suites: finite differences for
// rescaled gradients, a pairwise-secant lower envelope, exact polynomial
// differentiation for the Bernstein basis, and the closed-form fiber
// perturbation for affine determinants. These deliberately avoid the code
// paths they check.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "stringlab/field.hpp"
#include "stringlab/geometry.hpp"

namespace oracles {

using stringlab::Mat3;
using stringlab::TubeField;
using stringlab::Vec3;

// central differences of the deformation, with the cross-section rescaling
inline Mat3 fd_rescaled_gradient(const TubeField& f, const Vec3& x, double h) {
  double eps = f.epsilon();
  Vec3 c1 = (f.value({x.x + h, x.y, x.z}) - f.value({x.x - h, x.y, x.z})) / (2 * h);
  Vec3 c2 = (f.value({x.x, x.y + h, x.z}) - f.value({x.x, x.y - h, x.z})) / (2 * h * eps);
  Vec3 c3 = (f.value({x.x, x.y, x.z + h}) - f.value({x.x, x.y, x.z - h})) / (2 * h * eps);
  return Mat3::from_columns(c1, c2, c3);
}

// lower convex envelope of sampled points by brute force over all secants:
// at each abscissa the envelope equals the smallest value of any chord
// between bracketing samples
inline std::vector<double> secant_envelope(const std::vector<double>& xs,
                                           const std::vector<double>& ys) {
  const std::size_t m = xs.size();
  std::vector<double> env(m);
  for (std::size_t k = 0; k < m; ++k) {
    double best = ys[k];
    for (std::size_t i = 0; i < m; ++i) {
      if (xs[i] > xs[k]) break;
      for (std::size_t j = k; j < m; ++j) {
        if (i == j) continue;
        if (xs[j] < xs[k]) continue;
        double w = (xs[k] - xs[i]) / (xs[j] - xs[i]);
        best = std::min(best, (1 - w) * ys[i] + w * ys[j]);
      }
    }
    env[k] = best;
  }
  return env;
}

// exact monomial coefficients of b_{q,p} and their derivatives
inline std::vector<double> bernstein_coefficients(int q, int p) {
  // (1-t)^{p-q} t^q * C(p,q)
  auto binom = [](int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  std::vector<double> c(p + 1, 0.0);
  if (q < 0 || q > p) return c;
  for (int i = 0; i <= p - q; ++i) {
    double sgn = i % 2 ? -1.0 : 1.0;
    c[q + i] += binom(p, q) * sgn * binom(p - q, i);
  }
  return c;
}

inline double poly_eval_derivative(std::vector<double> c, double t, int order) {
  for (int d = 0; d < order; ++d) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) c[i] = (i + 1) * c[i + 1];
    c.pop_back();
    if (c.empty()) return 0;
  }
  double acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

// order-j derivative by iterating the first-derivative recurrence
// d b_{q,p} = p (b_{q-1,p-1} - b_{q,p-1}); numerically stable at any degree
inline double bernstein_derivative_recurrence(int q, int p, double t, int order) {
  if (order == 0) {
    auto binom = [](int n, int k) {
      double r = 1;
      for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
      return r;
    };
    if (q < 0 || q > p) return 0;
    return binom(p, q) * std::pow(1 - t, p - q) * std::pow(t, q);
  }
  return p * (bernstein_derivative_recurrence(q - 1, p - 1, t, order - 1) -
              bernstein_derivative_recurrence(q, p - 1, t, order - 1));
}

// separable solution of d phi/d s = 1/(a + b phi), phi(0) = 0
inline double phi_closed_form(double a, double b, double x3) {
  if (b == 0) return x3 / a;
  return (-a + std::sqrt(a * a + 2 * b * x3)) / b;
}

inline std::mt19937& rng() {
  static std::mt19937 gen(20240613);
  return gen;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

inline Vec3 random_vec(double lo, double hi) {
  return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
}

inline Vec3 random_unit() {
  while (true) {
    Vec3 v = random_vec(-1, 1);
    double n = stringlab::norm(v);
    if (n > 1e-3 && n <= 1) return v / n;
  }
}

}  // namespace oracles
