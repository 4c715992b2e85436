#include "stringlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stringlab/quadrature.hpp"

namespace stringlab {

EnergyResult energy(const TubeField& u, double alpha, const StoredDensity& model,
                    const Quadrature& quad, double det_tol, double omega_half) {
  const BoxGrid& grid = u.domain();
  const double L = grid.length;

  // axis panels aligned with the descriptor pieces, split to a sane width
  std::vector<double> edges = u.x1_breakpoints();
  edges.push_back(0);
  edges.push_back(L);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              edges.end());
  std::vector<double> panels;
  const double max_width = L / 8;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    double a = std::max(edges[k], 0.0), b = std::min(edges[k + 1], L);
    if (b - a < 1e-15) continue;
    int splits = std::max(1, int(std::ceil((b - a) / max_width)));
    for (int s = 0; s < splits; ++s) panels.push_back(a + (b - a) * s / splits);
  }
  panels.push_back(L);

  auto rule2 = gauss_legendre(quad.q2, -omega_half, omega_half);
  auto rule3 = gauss_legendre(quad.q3, -omega_half, omega_half);

  double acc = 0;
  for (std::size_t k = 0; k + 1 < panels.size(); ++k) {
    auto rule1 = gauss_legendre(quad.q1, panels[k], panels[k + 1]);
    for (const auto& n1 : rule1)
      for (const auto& n2 : rule2)
        for (const auto& n3 : rule3) {
          Vec3 x{n1.x, n2.x, n3.x};
          Mat3 f = u.rescaled_gradient_at(x);
          double w = eval_w(model, f, det_tol);
          if (!std::isfinite(w)) return {kInfiniteEnergy, true, x};
          acc += n1.w * n2.w * n3.w * w;
        }
  }
  return {acc * std::pow(u.epsilon(), -alpha), false, {}};
}

double limit_energy(std::span<const Vec3> slopes, std::span<const double> lengths,
                    const RadialEnvelope& env, double omega_area) {
  if (slopes.size() != lengths.size() || slopes.empty())
    throw std::invalid_argument("limit_energy: need matching slope/length lists");
  double acc = 0;
  for (std::size_t n = 0; n < slopes.size(); ++n)
    acc += env.envelope_at(norm(slopes[n])) * lengths[n];
  return omega_area * acc;
}

double limit_energy(const PiecewiseAffineCurve& curve, const RadialEnvelope& env,
                    double omega_area) {
  std::vector<Vec3> slopes;
  std::vector<double> lengths;
  for (std::size_t n = 0; n < curve.segments(); ++n) {
    slopes.push_back(curve.slope(n));
    lengths.push_back(curve.t[n + 1] - curve.t[n]);
  }
  return limit_energy(slopes, lengths, env, omega_area);
}

double limit_energy(const SmoothCurve& curve, const RadialEnvelope& env,
                    double omega_area) {
  double acc = 0;
  for (const auto& p : curve.pieces()) {
    for (const auto& node : gauss_legendre(12, p.t0, p.t1))
      acc += node.w * env.envelope_at(norm(curve.derivative(node.x, 1)));
  }
  return omega_area * acc;
}

double rate_fit(std::span<const double> eps, std::span<const double> values) {
  if (eps.size() != values.size()) throw std::invalid_argument("rate_fit: size mismatch");
  // drop the largest eps (pre-asymptotic), exclude nonpositive values
  double eps_max = 0;
  for (double e : eps) eps_max = std::max(eps_max, e);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] == eps_max) continue;
    if (!(values[i] > 0) || !std::isfinite(values[i])) continue;  // warned by caller
    xs.push_back(std::log(eps[i]));
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 3) throw std::invalid_argument("rate_fit: fewer than 3 usable records");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / sxx;
}

}  // namespace stringlab
